//! Command-line front end: `plan`, `bench`, `gen-map` and `render`.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::colony::{SolverParams, Tour};
use crate::error::{parameter, Error, Result};
use crate::fasaco::VelocitySchedule;
use crate::gridmap::CellCoord;
use crate::harness::{
    generate_random_map, maps, plan, render_pheromone_heatmap, render_svg, run_experiment_suite,
    table1_schedules, Algorithm, ExperimentConfig, MapSource,
};
use crate::metrics::CoverageReport;

#[derive(Debug, Parser)]
#[command(
    name = "fasaco",
    version,
    about = "Coverage path planning on occupancy grids"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Plan one coverage tour and report n_r, steps and CPU time.
    Plan(PlanArgs),
    /// Run a benchmark suite and write the result table.
    Bench(BenchArgs),
    /// Generate a random connected map in ASCII format.
    GenMap(GenMapArgs),
    /// Render a map, optionally with a tour from `plan --out-json`, to SVG.
    Render(RenderArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AlgoName {
    Fasaco,
    Aco,
    SpiralStc,
    Zigzag,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParamArgs {
    /// Colony size K
    #[arg(long)]
    pub ants: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub q0: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub tau0: Option<f64>,
    /// Numerator Q of the best-tour deposit
    #[arg(long)]
    pub quality: Option<f64>,
    /// Colony waves; each ends in a global deposit
    #[arg(long)]
    pub iterations: Option<usize>,
}

impl ParamArgs {
    fn overlay(&self, over: &ParamArgs) -> ParamArgs {
        ParamArgs {
            ants: over.ants.or(self.ants),
            seed: over.seed.or(self.seed),
            beta: over.beta.or(self.beta),
            q0: over.q0.or(self.q0),
            alpha: over.alpha.or(self.alpha),
            tau0: over.tau0.or(self.tau0),
            quality: over.quality.or(self.quality),
            iterations: over.iterations.or(self.iterations),
        }
    }

    fn to_params(&self) -> SolverParams {
        let d = SolverParams::default();
        SolverParams {
            ants: self.ants.unwrap_or(d.ants),
            seed: self.seed.unwrap_or(d.seed),
            beta: self.beta.unwrap_or(d.beta),
            q0: self.q0.unwrap_or(d.q0),
            alpha: self.alpha.unwrap_or(d.alpha),
            tau0: self.tau0.unwrap_or(d.tau0),
            quality: self.quality.unwrap_or(d.quality),
            iterations: self.iterations.unwrap_or(d.iterations),
        }
    }
}

#[derive(Debug, Args)]
pub struct PlanArgs {
    /// Map file (ASCII or .pgm), `builtin:NAME` or `gen:RxC:density:seed`
    #[arg(long)]
    pub map: String,
    #[arg(long, value_enum, default_value = "fasaco")]
    pub algo: AlgoName,
    /// Velocity schedule for fasaco, e.g. `decreasing:8..1`
    #[arg(long, default_value = "decreasing:8..1")]
    pub schedule: VelocitySchedule,
    #[command(flatten)]
    pub params: ParamArgs,
    /// Start cell as `i,j` (1-based)
    #[arg(long, value_parser = parse_start)]
    pub start: Option<CellCoord>,
    #[arg(long)]
    pub out_json: Option<PathBuf>,
    #[arg(long)]
    pub out_svg: Option<PathBuf>,
    /// Pheromone heat map of the final field (colony planners only)
    #[arg(long)]
    pub out_heatmap: Option<PathBuf>,
    /// Pheromone field as CSV (colony planners only)
    #[arg(long)]
    pub out_pheromone: Option<PathBuf>,
}

/// Bench options; the JSON config file uses the same keys.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchArgs {
    /// JSON file with the same keys as these flags; flags take precedence
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// The reference grid: 10 schedules plus baselines on the builtin maps
    #[arg(long)]
    pub table1: bool,
    /// Map sources (file, `builtin:NAME`, `gen:RxC:density:seed`)
    #[arg(long, num_args = 1..)]
    pub maps: Vec<String>,
    /// Velocity schedules; defaults to the ten reference schedules
    #[arg(long, num_args = 1..)]
    pub schedules: Vec<String>,
    #[command(flatten)]
    #[serde(flatten)]
    pub params: ParamArgs,
    #[arg(long)]
    pub repeats: Option<usize>,
    /// Worker threads
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Skip the ACO, Spiral-STC and ZigZag rows
    #[arg(long)]
    pub no_baselines: bool,
    /// Leave CPU times out of the outputs (byte-reproducible files)
    #[arg(long)]
    pub no_timing: bool,
    /// Result CSV path
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub out_json: Option<PathBuf>,
    /// Directory for one SVG per (map, algorithm) best tour
    #[arg(long)]
    pub svg_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenMapArgs {
    #[arg(long)]
    pub rows: usize,
    #[arg(long)]
    pub cols: usize,
    #[arg(long, default_value_t = 0.2)]
    pub density: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file; standard output when omitted
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    #[arg(long)]
    pub map: String,
    /// Plan report JSON holding a `tour` field
    #[arg(long)]
    pub tour: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

fn parse_start(s: &str) -> std::result::Result<CellCoord, String> {
    let (i, j) = s.split_once(',').ok_or("expected i,j")?;
    let i = i.trim().parse().map_err(|_| format!("bad row {i:?}"))?;
    let j = j.trim().parse().map_err(|_| format!("bad column {j:?}"))?;
    Ok(CellCoord::new(i, j))
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Plan output file.
#[derive(Debug, Serialize, Deserialize)]
pub struct PlanReport {
    pub map: String,
    pub algorithm: String,
    pub schedule: String,
    pub seed: u64,
    pub ants: usize,
    #[serde(flatten)]
    pub report: CoverageReport,
    pub tour: Tour,
}

/// Runs a parsed command and returns the process exit code: 0 iff every
/// requested run achieved complete coverage.
pub fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Plan(a) => cmd_plan(a),
        Command::Bench(a) => cmd_bench(a),
        Command::GenMap(a) => cmd_gen_map(a),
        Command::Render(a) => cmd_render(a),
    }
}

fn cmd_plan(a: PlanArgs) -> Result<i32> {
    let source: MapSource = a.map.parse()?;
    let grid = source.load()?;
    let params = a.params.to_params();
    let algorithm = match a.algo {
        AlgoName::Fasaco => Algorithm::Fasaco(a.schedule.clone()),
        AlgoName::Aco => Algorithm::Aco,
        AlgoName::SpiralStc => Algorithm::SpiralStc,
        AlgoName::Zigzag => Algorithm::ZigZag,
    };
    let out = plan(&grid, &algorithm, &params, a.start)?;
    println!(
        "map={} algorithm={} schedule={} n_r={} steps={} t_o={:.6}s covered={}",
        source.id(),
        algorithm.name(),
        algorithm.schedule_label(),
        out.report.n_r,
        out.report.steps,
        out.report.t_o,
        out.report.covered
    );
    if let Some(p) = &a.out_json {
        let report = PlanReport {
            map: source.id(),
            algorithm: algorithm.name().into(),
            schedule: algorithm.schedule_label(),
            seed: params.seed,
            ants: params.ants,
            report: out.report,
            tour: out.tour.clone(),
        };
        let mut s = serde_json::to_string_pretty(&report).map_err(|e| Error::Io(e.to_string()))?;
        s.push('\n');
        write(p, &s)?;
    }
    if let Some(p) = &a.out_svg {
        write(p, &render_svg(&grid, &out.tour)?)?;
    }
    if a.out_heatmap.is_some() || a.out_pheromone.is_some() {
        let field = out
            .field
            .as_ref()
            .ok_or_else(|| parameter(format!("{} keeps no pheromone field", algorithm.name())))?;
        if let Some(p) = &a.out_heatmap {
            write(p, &render_pheromone_heatmap(field, &grid)?)?;
        }
        if let Some(p) = &a.out_pheromone {
            write(p, &field.to_csv())?;
        }
    }
    Ok(if out.report.covered { 0 } else { 1 })
}

/// Merges an optional JSON config with flags (flags win) into a suite config.
pub fn bench_config(a: &BenchArgs) -> Result<(ExperimentConfig, BenchArgs)> {
    let file: BenchArgs = match &a.config {
        Some(p) => {
            let text =
                fs::read_to_string(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
            serde_json::from_str(&text).map_err(|e| parameter(format!("{}: {e}", p.display())))?
        }
        None => BenchArgs::default(),
    };
    let pick = |flag: &Vec<String>, cfg: &Vec<String>| {
        if flag.is_empty() {
            cfg.clone()
        } else {
            flag.clone()
        }
    };
    let merged = BenchArgs {
        config: a.config.clone(),
        table1: a.table1 || file.table1,
        maps: pick(&a.maps, &file.maps),
        schedules: pick(&a.schedules, &file.schedules),
        params: file.params.overlay(&a.params),
        repeats: a.repeats.or(file.repeats),
        jobs: a.jobs.or(file.jobs),
        no_baselines: a.no_baselines || file.no_baselines,
        no_timing: a.no_timing || file.no_timing,
        out: a.out.clone().or(file.out),
        out_json: a.out_json.clone().or(file.out_json),
        svg_dir: a.svg_dir.clone().or(file.svg_dir),
    };

    let mut maps: Vec<MapSource> = merged
        .maps
        .iter()
        .map(|m| m.parse())
        .collect::<Result<_>>()?;
    if maps.is_empty() {
        if !merged.table1 {
            return Err(parameter("no maps given; pass --maps or --table1"));
        }
        maps = maps::BUILTIN_NAMES
            .iter()
            .map(|n| MapSource::Builtin(n.to_string()))
            .collect();
    }
    let schedules = if merged.schedules.is_empty() {
        table1_schedules()
    } else {
        merged
            .schedules
            .iter()
            .map(|s| s.parse())
            .collect::<Result<_>>()?
    };
    let cfg = ExperimentConfig {
        maps,
        schedules,
        params: merged.params.to_params(),
        repeats: merged.repeats.unwrap_or(1),
        base_seed: merged.params.seed.unwrap_or(0),
        baselines: !merged.no_baselines,
        jobs: merged.jobs.unwrap_or(1),
    };
    Ok((cfg, merged))
}

fn cmd_bench(a: BenchArgs) -> Result<i32> {
    let (cfg, merged) = bench_config(&a)?;
    let table = run_experiment_suite(&cfg)?;
    let timing = !merged.no_timing;
    let csv = table.to_csv(timing)?;
    match &merged.out {
        Some(p) => write(p, &csv)?,
        None => print!("{csv}"),
    }
    if let Some(p) = &merged.out_json {
        write(p, &table.to_json(timing)?)?;
    }
    if let Some(dir) = &merged.svg_dir {
        fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
        let grids: Vec<_> = cfg.maps.iter().map(|m| (m.id(), m.load())).collect();
        for row in &table.rows {
            let (_, grid) = grids
                .iter()
                .find(|(id, _)| *id == row.map)
                .expect("row map is configured");
            let grid = grid.as_ref().map_err(Clone::clone)?;
            let name = format!(
                "{}_{}_{}.svg",
                sanitize(&row.map),
                row.algorithm,
                sanitize(&row.schedule)
            );
            write(&dir.join(name), &render_svg(grid, &row.best_tour)?)?;
        }
    }
    for row in table.rows.iter().filter(|r| !r.covered || r.failed) {
        eprintln!(
            "incomplete coverage: map={} algorithm={} schedule={}",
            row.map, row.algorithm, row.schedule
        );
    }
    Ok(if table.all_covered() { 0 } else { 1 })
}

fn sanitize(s: &str) -> String {
    s.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

fn cmd_gen_map(a: GenMapArgs) -> Result<i32> {
    let grid = generate_random_map(a.rows, a.cols, a.density, a.seed)?;
    let mut text = grid.to_ascii();
    text.push('\n');
    match &a.out {
        Some(p) => write(p, &text)?,
        None => print!("{text}"),
    }
    Ok(0)
}

fn cmd_render(a: RenderArgs) -> Result<i32> {
    let grid = a.map.parse::<MapSource>()?.load()?;
    let tour = match &a.tour {
        Some(p) => {
            let text =
                fs::read_to_string(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
            let report: PlanReport = serde_json::from_str(&text)
                .map_err(|e| parameter(format!("{}: {e}", p.display())))?;
            report.tour
        }
        None => Tour::default(),
    };
    write(&a.out, &render_svg(&grid, &tour)?)?;
    Ok(0)
}
