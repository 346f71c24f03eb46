//! Fast-spanning ant colony optimisation.
//!
//! The colony is split into cohorts that each move at their own velocity: a
//! velocity-`v` ant travels up to `v` cells in a straight line per decision,
//! entering (and covering) every intermediate cell and updating pheromone on
//! every unit edge it crosses. Cohorts run one after another on a shared
//! field, and the best tour so far is reinforced after each cohort, so the
//! trails left by fast cohorts steer the slower ones.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::colony::{check_field, Candidate, ColonyRun, MoveRule, SolverParams, Tour, Workspace};
use crate::error::{domain, parameter, Error, Result};
use crate::gridmap::{CellCoord, Direction, OccupancyGrid};
use crate::pheromone::PheromoneField;

/// How ant velocities are assigned across the colony.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum VelocitySchedule {
    /// Every ant moves at `v`.
    Constant(usize),
    /// One cohort per velocity `from..=to`, slowest first.
    Increasing { from: usize, to: usize },
    /// One cohort per velocity `from..=to` counted down, fastest first.
    Decreasing { from: usize, to: usize },
    /// Explicit `(velocity, ants)` cohorts in run order.
    Custom(Vec<(usize, usize)>),
}

/// A group of ants sharing one velocity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cohort {
    pub velocity: usize,
    pub ants: usize,
}

impl VelocitySchedule {
    /// Velocities in run order.
    pub fn velocities(&self) -> Vec<usize> {
        match self {
            VelocitySchedule::Constant(v) => vec![*v],
            VelocitySchedule::Increasing { from, to } => (*from..=*to).collect(),
            VelocitySchedule::Decreasing { from, to } => (*to..=*from).rev().collect(),
            VelocitySchedule::Custom(pairs) => pairs.iter().map(|&(v, _)| v).collect(),
        }
    }

    pub fn cohort_count(&self) -> usize {
        self.velocities().len()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(parameter(m));
        match self {
            VelocitySchedule::Constant(0) => bad("velocity must be at least 1".into()),
            VelocitySchedule::Increasing { from, to } if *from == 0 || from > to => bad(format!(
                "increasing schedule needs 1 <= from <= to, got {from}..{to}"
            )),
            VelocitySchedule::Decreasing { from, to } if *to == 0 || to > from => bad(format!(
                "decreasing schedule needs from >= to >= 1, got {from}..{to}"
            )),
            VelocitySchedule::Custom(pairs) if pairs.is_empty() => {
                bad("custom schedule has no cohorts".into())
            }
            VelocitySchedule::Custom(pairs) if pairs.iter().any(|&(v, k)| v == 0 || k == 0) => {
                bad("custom cohorts need velocity >= 1 and at least one ant".into())
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for VelocitySchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VelocitySchedule::Constant(v) => write!(f, "constant:{v}"),
            VelocitySchedule::Increasing { from, to } => write!(f, "increasing:{from}..{to}"),
            VelocitySchedule::Decreasing { from, to } => write!(f, "decreasing:{from}..{to}"),
            VelocitySchedule::Custom(pairs) => {
                f.write_str("custom:")?;
                for (k, (v, n)) in pairs.iter().enumerate() {
                    if k > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{v}x{n}")?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for VelocitySchedule {
    type Err = Error;

    /// Accepts `constant:v`, `increasing:a..b`, `decreasing:b..a` and
    /// `custom:VxN,VxN,...` (velocity `V` for `N` ants).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (kind, body) = s
            .split_once(':')
            .ok_or_else(|| parameter(format!("bad schedule {s:?}: expected kind:value")))?;
        let num = |t: &str| -> Result<usize> {
            t.trim()
                .parse()
                .map_err(|_| parameter(format!("bad schedule {s:?}: {t:?} is not a number")))
        };
        let range = |b: &str| -> Result<(usize, usize)> {
            let (a, z) = b
                .split_once("..")
                .ok_or_else(|| parameter(format!("bad schedule {s:?}: expected a..b")))?;
            Ok((num(a)?, num(z)?))
        };
        let sched = match kind.trim().to_ascii_lowercase().as_str() {
            "constant" => VelocitySchedule::Constant(num(body)?),
            "increasing" => {
                let (from, to) = range(body)?;
                VelocitySchedule::Increasing { from, to }
            }
            "decreasing" => {
                let (from, to) = range(body)?;
                VelocitySchedule::Decreasing { from, to }
            }
            "custom" => VelocitySchedule::Custom(
                body.split(',')
                    .map(|p| {
                        let (v, n) = p
                            .split_once(['x', 'X'])
                            .ok_or_else(|| parameter(format!("bad cohort {p:?}: expected VxN")))?;
                        Ok((num(v)?, num(n)?))
                    })
                    .collect::<Result<_>>()?,
            ),
            other => return Err(parameter(format!("unknown schedule kind {other:?}"))),
        };
        sched.validate()?;
        Ok(sched)
    }
}

impl TryFrom<String> for VelocitySchedule {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<VelocitySchedule> for String {
    fn from(s: VelocitySchedule) -> String {
        s.to_string()
    }
}

/// Splits `ants` into the schedule's cohorts as evenly as possible, giving the
/// remainder to the earliest cohorts. Custom schedules must already sum to
/// `ants`.
pub fn split_cohorts(ants: usize, schedule: &VelocitySchedule) -> Result<Vec<Cohort>> {
    schedule.validate()?;
    if let VelocitySchedule::Custom(pairs) = schedule {
        let total: usize = pairs.iter().map(|&(_, n)| n).sum();
        if total != ants {
            return Err(parameter(format!(
                "custom cohorts hold {total} ants, colony has {ants}"
            )));
        }
        return Ok(pairs
            .iter()
            .map(|&(velocity, ants)| Cohort { velocity, ants })
            .collect());
    }
    let velocities = schedule.velocities();
    let c = velocities.len();
    if ants < c {
        return Err(parameter(format!("{ants} ants cannot fill {c} cohorts")));
    }
    let (base, extra) = (ants / c, ants % c);
    Ok(velocities
        .into_iter()
        .enumerate()
        .map(|(k, velocity)| Cohort {
            velocity,
            ants: base + usize::from(k < extra),
        })
        .collect())
}

/// A straight move of up to `requested_velocity` cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FastMove {
    pub direction: Direction,
    pub requested_velocity: usize,
    /// Cells entered, in order; the last one is the landing cell.
    pub traversed: Vec<CellCoord>,
    /// Stopped short of the requested velocity by an obstacle or the border.
    pub truncated: bool,
}

impl FastMove {
    pub fn landing(&self) -> CellCoord {
        *self
            .traversed
            .last()
            .expect("accepted moves enter at least one cell")
    }
}

/// Furthest open cell within `v` steps of `at` in direction `d`, with its
/// distance. `None` when the first cell is blocked.
#[inline]
pub(crate) fn landing(
    grid: &OccupancyGrid,
    at: usize,
    d: Direction,
    v: usize,
) -> Option<(usize, usize)> {
    let mut cur = at;
    let mut dist = 0;
    while dist < v {
        match grid.open_step(cur, d) {
            Some(n) => {
                cur = n;
                dist += 1;
            }
            None => break,
        }
    }
    (dist > 0).then_some((cur, dist))
}

/// Advances cell by cell from `from` towards `direction`, stopping before the
/// first blocked or off-map cell. `Ok(None)` means the move is rejected (the
/// very first cell is blocked).
pub fn fast_move(
    grid: &OccupancyGrid,
    from: CellCoord,
    direction: Direction,
    velocity: usize,
) -> Result<Option<FastMove>> {
    let start = grid.offset(from)?;
    if !grid.is_open(start) {
        return Err(domain(format!("cell {from} is not free")));
    }
    if velocity == 0 {
        return Err(parameter("velocity must be at least 1"));
    }
    let mut traversed = Vec::with_capacity(velocity);
    let mut cur = start;
    while traversed.len() < velocity {
        match grid.open_step(cur, direction) {
            Some(n) => {
                traversed.push(grid.coord_of(n));
                cur = n;
            }
            None => break,
        }
    }
    if traversed.is_empty() {
        return Ok(None);
    }
    Ok(Some(FastMove {
        direction,
        requested_velocity: velocity,
        truncated: traversed.len() < velocity,
        traversed,
    }))
}

/// Open cells in a straight line from each cell, per direction.
pub(crate) fn free_runs(grid: &OccupancyGrid) -> Vec<[u32; 4]> {
    let (rows, cols) = (grid.rows(), grid.cols());
    let mut runs = vec![[0u32; 4]; rows * cols];
    let (up, down, left, right) = (
        Direction::Up.index(),
        Direction::Down.index(),
        Direction::Left.index(),
        Direction::Right.index(),
    );
    for r in 0..rows {
        for c in 0..cols {
            let o = r * cols + c;
            if r > 0 && grid.is_open(o - cols) {
                runs[o][up] = runs[o - cols][up] + 1;
            }
            if c > 0 && grid.is_open(o - 1) {
                runs[o][left] = runs[o - 1][left] + 1;
            }
        }
    }
    for r in (0..rows).rev() {
        for c in (0..cols).rev() {
            let o = r * cols + c;
            if r + 1 < rows && grid.is_open(o + cols) {
                runs[o][down] = runs[o + cols][down] + 1;
            }
            if c + 1 < cols && grid.is_open(o + 1) {
                runs[o][right] = runs[o + 1][right] + 1;
            }
        }
    }
    runs
}

/// Candidate generator for velocity-`v` ants: in each direction, the landing
/// cell at the feasible extent, provided it is unvisited. The weight uses the
/// pheromone on the first unit edge and `eta = 1 / dist` to the landing cell.
#[derive(Debug, Clone)]
pub(crate) struct FastMoves<'a> {
    velocity: usize,
    beta: f64,
    // eta^beta by landing distance
    eta_pow: Vec<f64>,
    runs: Option<&'a [[u32; 4]]>,
}

impl<'a> FastMoves<'a> {
    pub fn new(velocity: usize, beta: f64) -> Self {
        let eta_pow = (0..=velocity)
            .map(|d| {
                if d == 0 {
                    0.0
                } else {
                    (1.0 / d as f64).powf(beta)
                }
            })
            .collect();
        Self {
            velocity,
            beta,
            eta_pow,
            runs: None,
        }
    }

    /// Uses precomputed [`free_runs`] instead of scanning for landings.
    pub fn with_runs(mut self, runs: &'a [[u32; 4]]) -> Self {
        self.runs = Some(runs);
        self
    }

    #[inline]
    fn landing(&self, grid: &OccupancyGrid, at: usize, d: Direction) -> Option<(usize, usize)> {
        let Some(runs) = self.runs else {
            return landing(grid, at, d, self.velocity);
        };
        let dist = (runs[at][d.index()] as usize).min(self.velocity);
        if dist == 0 {
            return None;
        }
        let cols = grid.cols();
        let n = match d {
            Direction::Up => at - dist * cols,
            Direction::Down => at + dist * cols,
            Direction::Left => at - dist,
            Direction::Right => at + dist,
        };
        Some((n, dist))
    }
}

impl MoveRule for FastMoves<'_> {
    fn candidates(
        &self,
        grid: &OccupancyGrid,
        field: &PheromoneField,
        visited: &[bool],
        at: usize,
        beta: f64,
        out: &mut Vec<Candidate>,
    ) {
        debug_assert_eq!(beta.to_bits(), self.beta.to_bits());
        out.clear();
        for d in Direction::ALL {
            let Some((n, dist)) = self.landing(grid, at, d) else {
                continue;
            };
            if visited[n] {
                continue;
            }
            out.push(Candidate {
                dir: d,
                dist,
                landing: n,
                weight: field.at(at, d) * self.eta_pow[dist],
            });
        }
    }
}

/// Runs every cohort of `schedule` in order on `field`; after each cohort the
/// best tour so far receives the global deposit. Repeats the whole schedule
/// `params.iterations` times.
pub fn run_fasaco_on<R: Rng + ?Sized>(
    grid: &OccupancyGrid,
    field: &mut PheromoneField,
    params: &SolverParams,
    schedule: &VelocitySchedule,
    rng: &mut R,
    start: CellCoord,
) -> Result<ColonyRun> {
    params.validate()?;
    check_field(grid, field)?;
    let cohorts = split_cohorts(params.ants, schedule)?;
    let mut ws = Workspace::new(grid, start)?;
    let mut best: Option<Tour> = None;
    let mut ant_steps = Vec::with_capacity(params.ants * params.iterations);
    let runs = free_runs(grid);
    for _ in 0..params.iterations {
        for cohort in &cohorts {
            let rule = FastMoves::new(cohort.velocity, params.beta).with_runs(&runs);
            for _ in 0..cohort.ants {
                let steps = ws.build(grid, field, params, rng, &rule);
                ant_steps.push(steps);
                if best.as_ref().is_none_or(|b| steps < b.steps()) {
                    best = Some(Tour::from_offsets(grid, &ws.ant.path));
                }
            }
            let b = best.as_ref().expect("cohorts are non-empty");
            field.global_deposit(b, params.alpha, params.quality)?;
        }
    }
    Ok(ColonyRun {
        best: best.expect("cohorts are non-empty"),
        ant_steps,
    })
}

/// FaSACO on a fresh field; returns the best tour.
pub fn run_fasaco<R: Rng + ?Sized>(
    grid: &OccupancyGrid,
    params: &SolverParams,
    schedule: &VelocitySchedule,
    rng: &mut R,
    start: CellCoord,
) -> Result<Tour> {
    let mut field = PheromoneField::for_grid(grid, params.tau0)?;
    Ok(run_fasaco_on(grid, &mut field, params, schedule, rng, start)?.best)
}
