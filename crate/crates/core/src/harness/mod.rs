//! Experiment harness: single planning runs, the benchmark suite, stand-in
//! maps and figure rendering.

mod mapgen;
pub mod maps;
mod render;

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::baselines::{spiral_stc, zigzag};
use crate::colony::{run_aco_on, SolverParams, Tour};
use crate::error::{parameter, Error, Result};
use crate::fasaco::{run_fasaco_on, VelocitySchedule};
use crate::gridmap::{
    parse_ascii_map, parse_pgm_map, CellCoord, OccupancyGrid, DEFAULT_FREE_THRESHOLD,
    DEFAULT_OCCUPIED_THRESHOLD,
};
use crate::metrics::{excess_visits, measure_cpu_time, CoverageReport};
use crate::pheromone::PheromoneField;

pub use mapgen::generate_random_map;
pub use render::{render_pheromone_heatmap, render_svg};

/// A coverage planner.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Fasaco(VelocitySchedule),
    Aco,
    SpiralStc,
    ZigZag,
}

impl Algorithm {
    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Fasaco(_) => "fasaco",
            Algorithm::Aco => "aco",
            Algorithm::SpiralStc => "spiral-stc",
            Algorithm::ZigZag => "zigzag",
        }
    }

    /// Schedule column of result tables; `-` for the classical planners.
    pub fn schedule_label(&self) -> String {
        match self {
            Algorithm::Fasaco(s) => s.to_string(),
            Algorithm::Aco => VelocitySchedule::Constant(1).to_string(),
            Algorithm::SpiralStc | Algorithm::ZigZag => "-".into(),
        }
    }

    /// Key mixed into derived seeds. ACO shares it with `constant:1` so the
    /// two rows of a table see the same random stream.
    fn seed_key(&self) -> String {
        match self {
            Algorithm::Fasaco(_) | Algorithm::Aco => self.schedule_label(),
            other => other.name().to_string(),
        }
    }

    pub fn from_name(name: &str, schedule: Option<VelocitySchedule>) -> Result<Self> {
        Ok(match name {
            "fasaco" => Algorithm::Fasaco(
                schedule.unwrap_or(VelocitySchedule::Decreasing { from: 8, to: 1 }),
            ),
            "aco" => Algorithm::Aco,
            "spiral-stc" | "stc" => Algorithm::SpiralStc,
            "zigzag" => Algorithm::ZigZag,
            other => return Err(parameter(format!("unknown algorithm {other:?}"))),
        })
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Algorithm::Fasaco(s) => write!(f, "fasaco[{s}]"),
            other => f.write_str(other.name()),
        }
    }
}

/// Result of one planning call.
#[derive(Debug, Clone)]
pub struct PlanOutcome {
    pub tour: Tour,
    pub report: CoverageReport,
    /// Final pheromone field for the colony planners.
    pub field: Option<PheromoneField>,
}

/// Plans one coverage tour. Randomness comes only from `params.seed`; the
/// reported CPU time covers the planner call alone.
pub fn plan(
    grid: &OccupancyGrid,
    algorithm: &Algorithm,
    params: &SolverParams,
    start: Option<CellCoord>,
) -> Result<PlanOutcome> {
    let start = match start {
        Some(s) => s,
        None => grid
            .default_start()
            .ok_or_else(|| crate::error::domain("map has no free cell"))?,
    };
    let (result, t_o) = measure_cpu_time(|| -> Result<(Tour, Option<PheromoneField>)> {
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        match algorithm {
            Algorithm::Fasaco(s) => {
                let mut field = PheromoneField::for_grid(grid, params.tau0)?;
                let run = run_fasaco_on(grid, &mut field, params, s, &mut rng, start)?;
                Ok((run.best, Some(field)))
            }
            Algorithm::Aco => {
                let mut field = PheromoneField::for_grid(grid, params.tau0)?;
                let run = run_aco_on(grid, &mut field, params, &mut rng, start)?;
                Ok((run.best, Some(field)))
            }
            Algorithm::SpiralStc => Ok((spiral_stc(grid, start)?, None)),
            Algorithm::ZigZag => Ok((zigzag(grid, start)?, None)),
        }
    });
    let (tour, field) = result?;
    let report = CoverageReport::new(grid, &tour, t_o);
    Ok(PlanOutcome {
        tour,
        report,
        field,
    })
}

/// Where a benchmark map comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum MapSource {
    /// One of the maps shipped with the crate, see [`maps`].
    Builtin(String),
    /// `gen:RxC:density:seed`.
    Generated {
        rows: usize,
        cols: usize,
        density: f64,
        seed: u64,
    },
    /// ASCII map, or PGM image when the extension is `.pgm`.
    File(PathBuf),
}

impl FromStr for MapSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if let Some(name) = s.strip_prefix("builtin:") {
            return Ok(MapSource::Builtin(name.to_string()));
        }
        if let Some(body) = s.strip_prefix("gen:") {
            let bad = || {
                parameter(format!(
                    "bad generator spec {s:?}: expected gen:RxC:density:seed"
                ))
            };
            let parts: Vec<&str> = body.split(':').collect();
            let [dims, density, seed] = parts.as_slice() else {
                return Err(bad());
            };
            let (r, c) = dims.split_once(['x', 'X']).ok_or_else(bad)?;
            return Ok(MapSource::Generated {
                rows: r.parse().map_err(|_| bad())?,
                cols: c.parse().map_err(|_| bad())?,
                density: density.parse().map_err(|_| bad())?,
                seed: seed.parse().map_err(|_| bad())?,
            });
        }
        Ok(MapSource::File(PathBuf::from(s)))
    }
}

impl MapSource {
    /// Stable identifier used in tables and seed derivation.
    pub fn id(&self) -> String {
        match self {
            MapSource::Builtin(name) => name.clone(),
            MapSource::Generated {
                rows,
                cols,
                density,
                seed,
            } => format!("gen:{rows}x{cols}:{density}:{seed}"),
            MapSource::File(p) => p
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| p.display().to_string()),
        }
    }

    pub fn load(&self) -> Result<OccupancyGrid> {
        match self {
            MapSource::Builtin(name) => maps::builtin(name),
            MapSource::Generated {
                rows,
                cols,
                density,
                seed,
            } => generate_random_map(*rows, *cols, *density, *seed),
            MapSource::File(p) => {
                let bytes =
                    std::fs::read(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
                if p.extension().is_some_and(|e| e.eq_ignore_ascii_case("pgm")) {
                    parse_pgm_map(&bytes, DEFAULT_OCCUPIED_THRESHOLD, DEFAULT_FREE_THRESHOLD)
                } else {
                    let text = String::from_utf8(bytes).map_err(|_| {
                        crate::error::format(format!("{} is not UTF-8", p.display()))
                    })?;
                    parse_ascii_map(&text)
                }
            }
        }
    }
}

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn fnv1a(s: &str) -> u64 {
    s.bytes()
        .fold(FNV_OFFSET, |h, b| (h ^ b as u64).wrapping_mul(FNV_PRIME))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Per-run seed from the base seed, map id, schedule id and repeat index.
/// Each row's seed depends only on its own key.
pub fn derive_seed(base: u64, map_id: &str, schedule_id: &str, repeat: usize) -> u64 {
    let mut h = splitmix64(base);
    h = splitmix64(h ^ fnv1a(map_id));
    h = splitmix64(h ^ fnv1a(schedule_id));
    splitmix64(h ^ repeat as u64)
}

/// The ten velocity schedules of the reference experiment: constant 1..8,
/// increasing 1..8, decreasing 8..1.
pub fn table1_schedules() -> Vec<VelocitySchedule> {
    let mut s: Vec<_> = (1..=8).map(VelocitySchedule::Constant).collect();
    s.push(VelocitySchedule::Increasing { from: 1, to: 8 });
    s.push(VelocitySchedule::Decreasing { from: 8, to: 1 });
    s
}

/// A benchmark definition.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub maps: Vec<MapSource>,
    pub schedules: Vec<VelocitySchedule>,
    pub params: SolverParams,
    pub repeats: usize,
    pub base_seed: u64,
    /// Also run ACO, Spiral-STC and ZigZag on every map.
    pub baselines: bool,
    /// Worker threads; 1 runs rows sequentially.
    pub jobs: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            maps: maps::BUILTIN_NAMES
                .iter()
                .map(|n| MapSource::Builtin(n.to_string()))
                .collect(),
            schedules: table1_schedules(),
            params: SolverParams::default(),
            repeats: 1,
            base_seed: 0,
            baselines: true,
            jobs: 1,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.maps.is_empty() {
            return Err(parameter("experiment needs at least one map"));
        }
        if self.schedules.is_empty() && !self.baselines {
            return Err(parameter("experiment needs at least one schedule"));
        }
        if self.repeats == 0 {
            return Err(parameter("repeats must be at least 1"));
        }
        if self.jobs == 0 {
            return Err(parameter("jobs must be at least 1"));
        }
        self.params.validate()
    }
}

/// One planner execution inside the suite.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub seed: u64,
    pub report: CoverageReport,
    /// Steps agree with `free_cells - 1 + excess visits` of the tour.
    pub consistent: bool,
}

/// Aggregate of all repeats of one (map, algorithm) pair.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub map: String,
    pub algorithm: String,
    pub schedule: String,
    /// Seed of the first repeat.
    pub seed: u64,
    pub repeats: usize,
    pub n_r_median: f64,
    pub n_r_iqr: f64,
    pub t_o_median: f64,
    pub t_o_iqr: f64,
    pub steps_median: f64,
    /// Every repeat covered the reachable free set.
    pub covered: bool,
    pub failed: bool,
    pub runs: Vec<RunRecord>,
    /// Tour with the fewest re-covered cells across repeats.
    #[serde(skip)]
    pub best_tour: Tour,
}

/// Suite output, one row per (map, algorithm), in configuration order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResultTable {
    pub rows: Vec<ResultRow>,
}

/// Median and interquartile range with linear interpolation between order
/// statistics.
pub fn median_iqr(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let q = |p: f64| {
        let h = p * (v.len() - 1) as f64;
        let lo = h.floor() as usize;
        let hi = h.ceil() as usize;
        v[lo] + (h - lo as f64) * (v[hi] - v[lo])
    };
    (q(0.5), q(0.75) - q(0.25))
}

fn fmt_num(x: f64) -> String {
    if x.fract() == 0.0 {
        format!("{}", x as i64)
    } else {
        format!("{x}")
    }
}

impl ResultTable {
    pub fn all_covered(&self) -> bool {
        self.rows.iter().all(|r| r.covered && !r.failed)
    }

    pub fn row(&self, map: &str, algorithm: &str, schedule: &str) -> Option<&ResultRow> {
        self.rows
            .iter()
            .find(|r| r.map == map && r.algorithm == algorithm && r.schedule == schedule)
    }

    /// CSV with columns `map,algorithm,schedule,seed,n_r,t_o_seconds,steps,covered`
    /// holding medians across repeats. With `timing` off the `t_o_seconds`
    /// column is left empty so the output is reproducible byte for byte.
    pub fn to_csv(&self, timing: bool) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| Error::Io(e.to_string());
        w.write_record([
            "map",
            "algorithm",
            "schedule",
            "seed",
            "n_r",
            "t_o_seconds",
            "steps",
            "covered",
        ])
        .map_err(io)?;
        for r in &self.rows {
            let t_o = if timing {
                format!("{:.6}", r.t_o_median)
            } else {
                String::new()
            };
            let covered = (r.covered && !r.failed).to_string();
            w.write_record([
                r.map.as_str(),
                r.algorithm.as_str(),
                r.schedule.as_str(),
                &r.seed.to_string(),
                &fmt_num(r.n_r_median),
                &t_o,
                &fmt_num(r.steps_median),
                &covered,
            ])
            .map_err(io)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }

    /// JSON nested by map id. With `timing` off every CPU time is written as
    /// `null`.
    pub fn to_json(&self, timing: bool) -> Result<String> {
        let mut by_map: BTreeMap<&str, Vec<serde_json::Value>> = BTreeMap::new();
        for r in &self.rows {
            let mut v = serde_json::to_value(r).map_err(|e| Error::Io(e.to_string()))?;
            if !timing {
                v["t_o_median"] = serde_json::Value::Null;
                v["t_o_iqr"] = serde_json::Value::Null;
                if let Some(runs) = v["runs"].as_array_mut() {
                    for run in runs {
                        run["report"]["t_o"] = serde_json::Value::Null;
                    }
                }
            }
            by_map.entry(r.map.as_str()).or_default().push(v);
        }
        let mut s = serde_json::to_string_pretty(&by_map).map_err(|e| Error::Io(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }
}

struct Job {
    map: usize,
    algorithm: Algorithm,
    seed: u64,
}

/// Runs every (map, schedule, repeat) combination plus the baselines and
/// aggregates them into a table. Rows whose tours fail the coverage check
/// are marked failed, never dropped.
pub fn run_experiment_suite(config: &ExperimentConfig) -> Result<ResultTable> {
    config.validate()?;
    let grids: Vec<OccupancyGrid> = config
        .maps
        .iter()
        .map(MapSource::load)
        .collect::<Result<_>>()?;
    let ids: Vec<String> = config.maps.iter().map(MapSource::id).collect();

    let mut algorithms: Vec<Algorithm> = config
        .schedules
        .iter()
        .cloned()
        .map(Algorithm::Fasaco)
        .collect();
    if config.baselines {
        algorithms.extend([Algorithm::Aco, Algorithm::SpiralStc, Algorithm::ZigZag]);
    }
    let mut jobs = Vec::new();
    for (m, id) in ids.iter().enumerate() {
        for a in &algorithms {
            for repeat in 0..config.repeats {
                jobs.push(Job {
                    map: m,
                    algorithm: a.clone(),
                    seed: derive_seed(config.base_seed, id, &a.seed_key(), repeat),
                });
            }
        }
    }

    let run = |job: &Job| -> Result<(RunRecord, Tour)> {
        let grid = &grids[job.map];
        let params = SolverParams {
            seed: job.seed,
            ..config.params
        };
        let out = plan(grid, &job.algorithm, &params, None)?;
        let consistent = out.report.steps + 1 == out.report.free_cells + excess_visits(&out.tour);
        Ok((
            RunRecord {
                seed: job.seed,
                report: out.report,
                consistent,
            },
            out.tour,
        ))
    };
    let results: Vec<Result<(RunRecord, Tour)>> = if config.jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.jobs)
            .build()
            .map_err(|e| Error::Io(e.to_string()))?;
        pool.install(|| jobs.par_iter().map(run).collect())
    } else {
        jobs.iter().map(run).collect()
    };

    let mut table = ResultTable::default();
    let mut results = results.into_iter();
    for id in &ids {
        for a in &algorithms {
            let mut runs = Vec::with_capacity(config.repeats);
            let mut best: Option<Tour> = None;
            let mut best_nr = usize::MAX;
            for _ in 0..config.repeats {
                let (rec, tour) = results.next().expect("one result per job")?;
                if rec.report.n_r < best_nr {
                    best_nr = rec.report.n_r;
                    best = Some(tour);
                }
                runs.push(rec);
            }
            let col =
                |f: fn(&RunRecord) -> f64| median_iqr(&runs.iter().map(f).collect::<Vec<_>>());
            let (n_r_median, n_r_iqr) = col(|r| r.report.n_r as f64);
            let (t_o_median, t_o_iqr) = col(|r| r.report.t_o);
            let (steps_median, _) = col(|r| r.report.steps as f64);
            let covered = runs.iter().all(|r| r.report.covered);
            let failed = runs.iter().any(|r| !r.report.covered || !r.consistent);
            table.rows.push(ResultRow {
                map: id.clone(),
                algorithm: a.name().to_string(),
                schedule: a.schedule_label(),
                seed: runs[0].seed,
                repeats: config.repeats,
                n_r_median,
                n_r_iqr,
                t_o_median,
                t_o_iqr,
                steps_median,
                covered,
                failed,
                runs,
                best_tour: best.unwrap_or_default(),
            });
        }
    }
    Ok(table)
}
