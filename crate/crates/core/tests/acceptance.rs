//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any criterion fails.

use std::collections::VecDeque;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use fasaco::harness::{maps::BUILTIN_NAMES, median_iqr};
use fasaco::pheromone::PheromoneField;
use fasaco::{
    coverage_complete, generate_random_map, plan, recovered_cells, run_aco, run_experiment_suite,
    run_fasaco, select_next, spiral_stc, transition_probabilities, zigzag, Algorithm, AntState,
    CellCoord, ExperimentConfig, MapSource, MotionModel, OccupancyGrid, SolverParams,
    VelocitySchedule,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn decreasing() -> VelocitySchedule {
    VelocitySchedule::Decreasing { from: 8, to: 1 }
}

fn start_of(grid: &OccupancyGrid) -> CellCoord {
    grid.default_start().expect("map has a free cell")
}

fn degeneracy() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(0xdead);
    let mut same = 0;
    for m in 0..50u64 {
        let rows = rng.random_range(4..=30);
        let cols = rng.random_range(4..=30);
        let density = rng.random_range(0.0..0.3);
        let grid = generate_random_map(rows, cols, density, m).unwrap();
        let params = SolverParams {
            ants: 200,
            seed: 1000 + m,
            ..SolverParams::default()
        };
        let start = start_of(&grid);
        let fast = run_fasaco(
            &grid,
            &params,
            &VelocitySchedule::Constant(1),
            &mut ChaCha8Rng::seed_from_u64(params.seed),
            start,
        )
        .unwrap();
        let aco = run_aco(
            &grid,
            &params,
            &mut ChaCha8Rng::seed_from_u64(params.seed),
            start,
        )
        .unwrap();
        if fast == aco {
            same += 1;
        }
    }
    verdict(same == 50, format!("{same}/50 maps with identical tours"))
}

fn coverage() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(0xc0de);
    let schedules = fasaco::harness::table1_schedules();
    let mut maps: Vec<(String, OccupancyGrid)> = (0..100u64)
        .map(|m| {
            let rows = rng.random_range(2..=50);
            let cols = rng.random_range(2..=50);
            let density = rng.random_range(0.0..=0.3);
            let g = generate_random_map(rows, cols, density, m).unwrap();
            (format!("gen {rows}x{cols} d={density:.2} seed={m}"), g)
        })
        .collect();
    for name in BUILTIN_NAMES {
        maps.push((
            name.to_string(),
            MapSource::Builtin(name.into()).load().unwrap(),
        ));
    }
    let mut failures = Vec::new();
    let mut runs = 0;
    for (k, (name, grid)) in maps.iter().enumerate() {
        let params = SolverParams {
            ants: 40,
            seed: k as u64,
            ..SolverParams::default()
        };
        let algorithms = [
            Algorithm::Fasaco(schedules[k % schedules.len()].clone()),
            Algorithm::Fasaco(decreasing()),
            Algorithm::Aco,
            Algorithm::SpiralStc,
            Algorithm::ZigZag,
        ];
        let start = start_of(grid);
        let reachable = fasaco::search::reachable_cells(grid, start);
        for a in &algorithms {
            runs += 1;
            let out = plan(grid, a, &params, Some(start)).unwrap();
            let mut distinct = out.tour.cells().to_vec();
            distinct.sort();
            distinct.dedup();
            let mut want = reachable.clone();
            want.sort();
            if distinct != want || !coverage_complete(&out.tour, grid) || !out.tour.is_connected() {
                failures.push(format!("{name} {a}"));
            }
        }
    }
    verdict(
        failures.is_empty(),
        format!(
            "{} failures over {runs} runs on {} maps {:?}",
            failures.len(),
            maps.len(),
            failures
        ),
    )
}

struct Comparison {
    map_wins: usize,
    maps: usize,
    reduction: f64,
    t_fast: f64,
    t_aco: f64,
    time_map_wins: usize,
}

const COMPARE_ANTS: usize = 1000;

/// 20 maps of 32x32 with obstacle densities spread evenly over 0..0.3, five
/// seeds each, FaSACO with decreasing velocities against ACO.
fn compare_with_aco() -> Comparison {
    let maps: Vec<MapSource> = (0..20u64)
        .map(|m| MapSource::Generated {
            rows: 32,
            cols: 32,
            density: 0.3 * m as f64 / 19.0,
            seed: 500 + m,
        })
        .collect();
    let config = ExperimentConfig {
        maps: maps.clone(),
        schedules: vec![decreasing()],
        params: SolverParams {
            ants: COMPARE_ANTS,
            ..SolverParams::default()
        },
        repeats: 5,
        base_seed: 11,
        baselines: true,
        jobs: 1,
    };
    let table = run_experiment_suite(&config).unwrap();
    let mut map_wins = 0;
    let mut time_map_wins = 0;
    let mut reductions = Vec::new();
    let (mut all_fast, mut all_aco) = (Vec::new(), Vec::new());
    for m in &maps {
        let id = m.id();
        let f = table.row(&id, "fasaco", "decreasing:8..1").unwrap();
        let a = table.row(&id, "aco", "constant:1").unwrap();
        assert!(!f.failed && !a.failed, "coverage failure on {id}");
        if f.n_r_median <= a.n_r_median {
            map_wins += 1;
        }
        if f.t_o_median <= 0.9 * a.t_o_median {
            time_map_wins += 1;
        }
        reductions.push(if a.n_r_median > 0.0 {
            1.0 - f.n_r_median / a.n_r_median
        } else if f.n_r_median == 0.0 {
            0.0
        } else {
            -1.0
        });
        all_fast.extend(f.runs.iter().map(|r| r.report.t_o));
        all_aco.extend(a.runs.iter().map(|r| r.report.t_o));
    }
    Comparison {
        map_wins,
        maps: maps.len(),
        reduction: median_iqr(&reductions).0,
        t_fast: median_iqr(&all_fast).0,
        t_aco: median_iqr(&all_aco).0,
        time_map_wins,
    }
}

fn recover_claim(c: &Comparison) -> Verdict {
    let share = c.map_wins as f64 / c.maps as f64;
    verdict(
        share >= 0.7 && c.reduction >= 0.03,
        format!(
            "K={COMPARE_ANTS}: FaSACO median n_r <= ACO on {}/{} maps ({:.0}%, need 70%), median reduction {:.1}% (need 3%)",
            c.map_wins,
            c.maps,
            share * 100.0,
            c.reduction * 100.0
        ),
    )
}

fn time_claim(c: &Comparison) -> Verdict {
    verdict(
        c.t_fast <= 0.9 * c.t_aco,
        format!(
            "median t_o FaSACO {:.4}s vs ACO {:.4}s (ratio {:.3}, need <= 0.9); per-map >=10% faster on {}/{}",
            c.t_fast,
            c.t_aco,
            c.t_fast / c.t_aco,
            c.time_map_wins,
            c.maps
        ),
    )
}

fn baseline_ordering() -> Verdict {
    let config = ExperimentConfig {
        maps: BUILTIN_NAMES
            .iter()
            .map(|n| MapSource::Builtin(n.to_string()))
            .collect(),
        schedules: vec![decreasing()],
        params: SolverParams::default(),
        repeats: 3,
        base_seed: 5,
        baselines: true,
        jobs: 1,
    };
    let table = run_experiment_suite(&config).unwrap();
    let mut ok = true;
    let mut parts = Vec::new();
    for name in BUILTIN_NAMES {
        let f = table.row(name, "fasaco", "decreasing:8..1").unwrap();
        let stc = table.row(name, "spiral-stc", "-").unwrap();
        let zz = table.row(name, "zigzag", "-").unwrap();
        let fine = f.n_r_median < stc.n_r_median
            && f.n_r_median < zz.n_r_median
            && stc.t_o_median < 0.1 * f.t_o_median
            && zz.t_o_median < 0.1 * f.t_o_median;
        ok &= fine;
        parts.push(format!(
            "{name}: n_r {}/{}/{} t_o {:.4}/{:.5}/{:.5} {}",
            f.n_r_median,
            stc.n_r_median,
            zz.n_r_median,
            f.t_o_median,
            stc.t_o_median,
            zz.t_o_median,
            if fine { "ok" } else { "violated" }
        ));
    }
    verdict(ok, format!("(fasaco/stc/zigzag) {}", parts.join("; ")))
}

/// Fewest steps of any walk from `start` that enters every free cell.
fn optimal_coverage_steps(grid: &OccupancyGrid, start: CellCoord) -> usize {
    let cells = grid.free_cells();
    let bit = |c: CellCoord| cells.iter().position(|&x| x == c).unwrap();
    let full = (1usize << cells.len()) - 1;
    let mut dist = vec![usize::MAX; cells.len() << cells.len()];
    let s = bit(start);
    let key = |p: usize, mask: usize| mask * cells.len() + p;
    dist[key(s, 1 << s)] = 0;
    let mut queue = VecDeque::from([(s, 1usize << s)]);
    while let Some((p, mask)) = queue.pop_front() {
        let d = dist[key(p, mask)];
        if mask == full {
            return d;
        }
        for n in fasaco::neighbors(grid, cells[p], &MotionModel) {
            let q = bit(n);
            let m = mask | (1 << q);
            if dist[key(q, m)] == usize::MAX {
                dist[key(q, m)] = d + 1;
                queue.push_back((q, m));
            }
        }
    }
    unreachable!("free set is connected")
}

fn tiny_optimality() -> Verdict {
    let mut instances = Vec::new();
    for a in 0..9usize {
        for b in a..9 {
            for count in 0..=2usize {
                // count 0 uses (a, b) = (0, 0) only; count 1 uses a == b
                let blocked: Vec<usize> = match count {
                    0 if a == 0 && b == 0 => vec![],
                    1 if a == b => vec![a],
                    2 if a < b => vec![a, b],
                    _ => continue,
                };
                let text: String = (0..3)
                    .map(|r| {
                        (0..3)
                            .map(|c| {
                                if blocked.contains(&(r * 3 + c)) {
                                    '#'
                                } else {
                                    '.'
                                }
                            })
                            .collect::<String>()
                    })
                    .collect::<Vec<_>>()
                    .join("\n");
                let g = fasaco::parse_ascii_map(&text).unwrap();
                let start = start_of(&g);
                if fasaco::search::reachable_cells(&g, start).len() == g.free_count() {
                    instances.push(g);
                }
            }
        }
    }
    let params = SolverParams {
        ants: 500,
        iterations: 3,
        ..SolverParams::default()
    };
    let (mut aco_ok, mut fast_ok) = (0, 0);
    for (k, g) in instances.iter().enumerate() {
        let start = start_of(g);
        let best = optimal_coverage_steps(g, start);
        let p = SolverParams {
            seed: k as u64,
            ..params
        };
        let aco = run_aco(g, &p, &mut ChaCha8Rng::seed_from_u64(p.seed), start).unwrap();
        let fast = run_fasaco(
            g,
            &p,
            &decreasing(),
            &mut ChaCha8Rng::seed_from_u64(p.seed),
            start,
        )
        .unwrap();
        aco_ok += usize::from(aco.steps() <= best + 2);
        fast_ok += usize::from(fast.steps() <= best + 2);
    }
    let n = instances.len();
    let need = (0.9 * n as f64).ceil() as usize;
    verdict(
        aco_ok >= need && fast_ok >= need,
        format!(
            "{n} instances; within +2 of optimum: ACO {aco_ok}, FaSACO {fast_ok} (need {need})"
        ),
    )
}

/// Random ant state: a random walk from a random free cell on a random
/// small map, with a field shaped by random local updates and deposits.
fn random_state(rng: &mut ChaCha8Rng) -> (OccupancyGrid, PheromoneField, AntState) {
    let rows = rng.random_range(2..=9);
    let cols = rng.random_range(2..=9);
    let grid = generate_random_map(rows, cols, rng.random_range(0.0..0.4), rng.random()).unwrap();
    let tau0 = 10f64.powf(rng.random_range(-6.0..1.0));
    let mut field =
        PheromoneField::with_initial(rows, cols, tau0, tau0 * rng.random_range(0.01..100.0))
            .unwrap();
    let free = grid.free_cells();
    let velocity = rng.random_range(1..=8);
    let mut state = AntState::new(&grid, free[rng.random_range(0..free.len())], velocity).unwrap();
    for _ in 0..rng.random_range(0..2 * free.len()) {
        let here = state.current();
        let next = fasaco::neighbors(&grid, here, &MotionModel);
        if next.is_empty() {
            break;
        }
        let n = next[rng.random_range(0..next.len())];
        field
            .local_update(here, n, rng.random_range(0.01..0.99))
            .unwrap();
        state.step_to(&grid, n).unwrap();
    }
    if rng.random_bool(0.5) && state.tour().len() > 1 {
        field
            .global_deposit(
                &state.tour(),
                rng.random_range(0.01..0.99),
                rng.random_range(0.1..10.0),
            )
            .unwrap();
    }
    (grid, field, state)
}

fn normalization() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let (mut checked, mut dead_ends, mut bad) = (0, 0, 0);
    let mut worst: f64 = 0.0;
    while checked < 100_000 {
        let (grid, field, state) = random_state(&mut rng);
        let params = SolverParams {
            beta: rng.random_range(0.0..5.0),
            ..SolverParams::default()
        };
        match transition_probabilities(&grid, &field, &state, &params) {
            None => dead_ends += 1,
            Some(dist) => {
                checked += 1;
                let sum: f64 = dist.iter().map(|t| t.probability).sum();
                worst = worst.max((sum - 1.0).abs());
                let visited_mass = dist
                    .iter()
                    .any(|t| state.has_visited(t.cell) && t.probability != 0.0);
                if (sum - 1.0).abs() > 1e-12 || visited_mass {
                    bad += 1;
                }
            }
        }
    }
    verdict(
        bad == 0,
        format!("{checked} distributions + {dead_ends} dead ends; max |sum-1| = {worst:.2e}; {bad} violations"),
    )
}

fn closed_form() -> Verdict {
    let mut worst: f64 = 0.0;
    let from = CellCoord::new(1, 1);
    let to = CellCoord::new(1, 2);
    for alpha in [0.01, 0.1, 0.5] {
        for (tau0, init) in [(1.0, 2.0), (1.0, 0.2), (1e-6, 0.5), (3.0, 3.0)] {
            let mut f = PheromoneField::with_initial(1, 2, tau0, init).unwrap();
            for n in 1..=1000 {
                let got = f.local_update(from, to, alpha).unwrap();
                let keep = (1.0 - alpha).powi(n);
                let want = keep * init + (1.0 - keep) * tau0;
                worst = worst.max((got - want).abs());
            }
        }
    }
    verdict(
        worst <= 1e-9,
        format!("max deviation {worst:.2e} over alpha in {{0.01, 0.1, 0.5}}, n <= 1000"),
    )
}

fn sampling_fidelity() -> Verdict {
    // centre of an open 3x3 map with distinct pheromone on its four exits
    let grid = OccupancyGrid::open(3, 3).unwrap();
    let centre = CellCoord::new(2, 2);
    let exits = [
        CellCoord::new(1, 2),
        CellCoord::new(3, 2),
        CellCoord::new(2, 1),
        CellCoord::new(2, 3),
    ];
    let mut field = PheromoneField::with_initial(3, 3, 1.0, 0.2).unwrap();
    for (k, &e) in exits.iter().enumerate() {
        for _ in 0..k {
            field.local_update(centre, e, 0.5).unwrap();
        }
    }
    let tau: Vec<f64> = exits
        .iter()
        .map(|&e| field.tau(centre, e).unwrap())
        .collect();
    let total: f64 = tau.iter().sum();
    let expected: Vec<f64> = tau.iter().map(|t| t / total).collect();

    let params = SolverParams {
        q0: 0.0,
        ..SolverParams::default()
    };
    let state = AntState::new(&grid, centre, 1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let draws = 100_000;
    let mut counts = [0usize; 4];
    for _ in 0..draws {
        let c = select_next(&grid, &field, &state, &params, &mut rng).unwrap();
        counts[exits.iter().position(|&e| e == c).unwrap()] += 1;
    }
    let chi2: f64 = counts
        .iter()
        .zip(&expected)
        .map(|(&o, &p)| {
            let e = p * draws as f64;
            (o as f64 - e).powi(2) / e
        })
        .sum();
    let p_value = 1.0 - ChiSquared::new(3.0).unwrap().cdf(chi2);
    verdict(
        p_value > 0.01,
        format!("expected {expected:.4?}, counts {counts:?}, chi2 = {chi2:.3}, p = {p_value:.3}"),
    )
}

fn zero_recover_baselines() -> Verdict {
    let mut bad = Vec::new();
    let mut grids = 0;
    for rows in (2..=20).step_by(2) {
        for cols in (2..=20).step_by(2) {
            grids += 1;
            let g = OccupancyGrid::open(rows, cols).unwrap();
            let start = CellCoord::new(1, 1);
            for (name, t) in [
                ("zigzag", zigzag(&g, start)),
                ("spiral-stc", spiral_stc(&g, start)),
            ] {
                let t = t.unwrap();
                if recovered_cells(&t) != 0 || !coverage_complete(&t, &g) {
                    bad.push(format!("{name} {rows}x{cols}"));
                }
            }
        }
    }
    verdict(
        bad.is_empty(),
        format!("{grids} even grids up to 20x20; violations {bad:?}"),
    )
}

fn run_cli(args: &[&str]) {
    let out = Command::new(env!("CARGO_BIN_EXE_fasaco"))
        .args(args)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "fasaco {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
}

fn outputs(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = walk(dir)
        .into_iter()
        .map(|p| {
            (
                p.strip_prefix(dir).unwrap().display().to_string(),
                std::fs::read(&p).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

fn walk(dir: &Path) -> Vec<std::path::PathBuf> {
    let mut out = Vec::new();
    for e in std::fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        if p.is_dir() {
            out.extend(walk(&p));
        } else {
            out.push(p);
        }
    }
    out
}

fn cli_determinism() -> Verdict {
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for d in &dirs {
        let p = |name: &str| d.path().join(name).display().to_string();
        std::fs::create_dir(d.path().join("figs")).unwrap();
        run_cli(&[
            "bench",
            "--maps",
            "builtin:office",
            "gen:14x18:0.2:3",
            "--ants",
            "60",
            "--repeats",
            "2",
            "--seed",
            "9",
            "--no-timing",
            "--out",
            &p("bench.csv"),
            "--out-json",
            &p("bench.json"),
            "--svg-dir",
            &p("figs"),
        ]);
        run_cli(&[
            "plan",
            "--map",
            "gen:16x16:0.15:8",
            "--ants",
            "80",
            "--seed",
            "42",
            "--out-svg",
            &p("plan.svg"),
            "--out-heatmap",
            &p("heat.svg"),
            "--out-pheromone",
            &p("field.csv"),
        ]);
    }
    let (a, b) = (outputs(dirs[0].path()), outputs(dirs[1].path()));
    let differing: Vec<&String> = a
        .iter()
        .zip(&b)
        .filter(|(x, y)| x != y)
        .map(|(x, _)| &x.0)
        .collect();
    verdict(
        a.len() == b.len() && differing.is_empty() && a.len() >= 6,
        format!("{} files compared; differing {differing:?}", a.len()),
    )
}

fn main() {
    let started = Instant::now();
    let mut failed = Vec::new();
    let mut report = |id: usize, name: &str, f: &mut dyn FnMut() -> Verdict| {
        let t = Instant::now();
        let v = f();
        println!(
            "[{}] {id:>2} {name}: {} ({:.1}s)",
            if v.pass { "PASS" } else { "FAIL" },
            v.detail,
            t.elapsed().as_secs_f64()
        );
        if !v.pass {
            failed.push(id);
        }
    };
    report(1, "degeneracy equivalence", &mut degeneracy);
    report(2, "coverage completeness", &mut coverage);
    let mut comparison = None;
    report(3, "re-coverage vs ACO", &mut || {
        let c = compare_with_aco();
        let v = recover_claim(&c);
        comparison = Some(c);
        v
    });
    report(4, "CPU time vs ACO", &mut || {
        time_claim(comparison.as_ref().unwrap())
    });
    report(5, "baseline ordering", &mut baseline_ordering);
    report(6, "tiny-instance optimality", &mut tiny_optimality);
    report(7, "probability normalization", &mut normalization);
    report(8, "pheromone closed form", &mut closed_form);
    report(9, "sampling-branch fidelity", &mut sampling_fidelity);
    report(10, "zero re-cover baselines", &mut zero_recover_baselines);
    report(11, "CLI determinism", &mut cli_determinism);
    println!(
        "acceptance: {} failed {:?} ({:.1}s)",
        failed.len(),
        failed,
        started.elapsed().as_secs_f64()
    );
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
