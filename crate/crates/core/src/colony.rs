//! Ant colony tour construction.
//!
//! An ant repeatedly picks its next move with the pseudo-random-proportional
//! rule: with probability `q0` it exploits the best `tau * eta^beta` candidate,
//! otherwise it samples a candidate in proportion to that weight. When every
//! candidate is visited it escapes along a BFS shortest path to the nearest
//! unvisited cell; those escapes are what produce re-covered cells.
//!
//! Classic ACO is the velocity-1 case. Faster ants live in [`crate::fasaco`]
//! and plug into the same construction loop through [`MoveRule`].

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, parameter, Result};
use crate::fasaco::FastMoves;
use crate::gridmap::{manhattan, CellCoord, Direction, OccupancyGrid};
use crate::pheromone::{check_alpha, PheromoneField};
use crate::search::{reachable_mask, Bfs};

pub const DEFAULT_BETA: f64 = 2.0;
pub const DEFAULT_Q0: f64 = 0.9;
pub const DEFAULT_ALPHA: f64 = 0.1;
pub const DEFAULT_TAU0: f64 = 1.0e-6;
pub const DEFAULT_QUALITY: f64 = 1.0;
pub const DEFAULT_ANTS: usize = 1000;

/// Solver parameters shared by ACO and FaSACO.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverParams {
    /// Weight of the distance heuristic.
    pub beta: f64,
    /// Probability of taking the greedy branch.
    pub q0: f64,
    /// Pheromone decay / learning rate, in (0, 1).
    pub alpha: f64,
    /// Initial and baseline pheromone level.
    pub tau0: f64,
    /// Numerator `Q` of the best-tour deposit `Q / steps`.
    pub quality: f64,
    /// Colony size `K`.
    pub ants: usize,
    /// Number of colony waves, each ending in a global deposit.
    pub iterations: usize,
    pub seed: u64,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            beta: DEFAULT_BETA,
            q0: DEFAULT_Q0,
            alpha: DEFAULT_ALPHA,
            tau0: DEFAULT_TAU0,
            quality: DEFAULT_QUALITY,
            ants: DEFAULT_ANTS,
            iterations: 1,
            seed: 0,
        }
    }
}

impl SolverParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.q0) {
            return Err(parameter(format!("q0 must lie in [0, 1], got {}", self.q0)));
        }
        check_alpha(self.alpha)?;
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return Err(parameter(format!(
                "beta must be non-negative, got {}",
                self.beta
            )));
        }
        if !(self.tau0 > 0.0 && self.tau0.is_finite()) {
            return Err(parameter(format!(
                "tau0 must be positive, got {}",
                self.tau0
            )));
        }
        if !(self.quality > 0.0 && self.quality.is_finite()) {
            return Err(parameter(format!(
                "quality must be positive, got {}",
                self.quality
            )));
        }
        if self.ants == 0 {
            return Err(parameter("colony needs at least one ant"));
        }
        if self.iterations == 0 {
            return Err(parameter("need at least one iteration"));
        }
        Ok(())
    }
}

/// Ordered cells entered by one ant or planner, re-covered cells included.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tour {
    cells: Vec<CellCoord>,
}

impl Tour {
    pub fn new(cells: Vec<CellCoord>) -> Self {
        Self { cells }
    }

    pub fn cells(&self) -> &[CellCoord] {
        &self.cells
    }

    pub fn into_cells(self) -> Vec<CellCoord> {
        self.cells
    }

    /// Unit-edge traversals.
    pub fn steps(&self) -> usize {
        self.cells.len().saturating_sub(1)
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Whether every consecutive pair of cells is 4-adjacent.
    pub fn is_connected(&self) -> bool {
        self.cells.windows(2).all(|w| manhattan(w[0], w[1]) == 1)
    }

    pub(crate) fn from_offsets(grid: &OccupancyGrid, path: &[usize]) -> Self {
        Self::new(path.iter().map(|&o| grid.coord_of(o)).collect())
    }
}

/// One ant mid-construction.
#[derive(Debug, Clone)]
pub struct AntState {
    current: usize,
    visited: Vec<bool>,
    visited_count: usize,
    pub(crate) path: Vec<usize>,
    velocity: usize,
    cols: usize,
}

impl AntState {
    pub fn new(grid: &OccupancyGrid, start: CellCoord, velocity: usize) -> Result<Self> {
        let s = grid.offset(start)?;
        if !grid.is_open(s) {
            return Err(domain(format!("start cell {start} is not free")));
        }
        if velocity == 0 {
            return Err(parameter("velocity must be at least 1"));
        }
        let mut ant = Self {
            current: s,
            visited: vec![false; grid.len()],
            visited_count: 0,
            path: Vec::with_capacity(grid.len()),
            velocity,
            cols: grid.cols(),
        };
        ant.reset(s);
        Ok(ant)
    }

    fn reset(&mut self, start: usize) {
        self.visited.iter_mut().for_each(|v| *v = false);
        self.path.clear();
        self.current = start;
        self.visited[start] = true;
        self.visited_count = 1;
        self.path.push(start);
    }

    fn coord(&self, off: usize) -> CellCoord {
        CellCoord::new(off / self.cols + 1, off % self.cols + 1)
    }

    pub fn current(&self) -> CellCoord {
        self.coord(self.current)
    }

    pub fn velocity(&self) -> usize {
        self.velocity
    }

    pub fn has_visited(&self, c: CellCoord) -> bool {
        c.i >= 1
            && c.j >= 1
            && c.j <= self.cols
            && self
                .visited
                .get((c.i - 1) * self.cols + (c.j - 1))
                .copied()
                .unwrap_or(false)
    }

    pub fn visited_count(&self) -> usize {
        self.visited_count
    }

    pub fn tour(&self) -> Tour {
        Tour::new(self.path.iter().map(|&o| self.coord(o)).collect())
    }

    /// Enters `cell`, which must be 4-adjacent to the current cell and free.
    /// Does not touch pheromone.
    pub fn step_to(&mut self, grid: &OccupancyGrid, cell: CellCoord) -> Result<()> {
        let n = grid.offset(cell)?;
        if !grid.is_open(n) {
            return Err(domain(format!("cell {cell} is not free")));
        }
        if manhattan(self.current(), cell) != 1 {
            return Err(domain(format!(
                "cell {cell} is not adjacent to {}",
                self.current()
            )));
        }
        self.enter(n);
        Ok(())
    }

    #[inline]
    fn enter(&mut self, n: usize) {
        self.current = n;
        if !self.visited[n] {
            self.visited[n] = true;
            self.visited_count += 1;
        }
        self.path.push(n);
    }

    /// Moves one unit edge and applies the local pheromone update to it.
    #[inline]
    fn walk(&mut self, grid: &OccupancyGrid, field: &mut PheromoneField, d: Direction, alpha: f64) {
        let n = grid
            .open_step(self.current, d)
            .expect("walk stays on open cells");
        field.touch(self.current, d, alpha);
        self.enter(n);
    }
}

/// A move the ant may take next: travel `dist` cells in `dir` to `landing`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Candidate {
    pub dir: Direction,
    pub dist: usize,
    pub landing: usize,
    pub weight: f64,
}

/// Enumerates candidate moves in fixed direction order.
pub(crate) trait MoveRule {
    fn candidates(
        &self,
        grid: &OccupancyGrid,
        field: &PheromoneField,
        visited: &[bool],
        at: usize,
        beta: f64,
        out: &mut Vec<Candidate>,
    );
}

/// The plain motion model: unvisited free 4-neighbours.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct UnitMoves;

impl MoveRule for UnitMoves {
    fn candidates(
        &self,
        grid: &OccupancyGrid,
        field: &PheromoneField,
        visited: &[bool],
        at: usize,
        _beta: f64,
        out: &mut Vec<Candidate>,
    ) {
        out.clear();
        for d in Direction::ALL {
            if let Some(n) = grid.open_step(at, d) {
                if !visited[n] {
                    // eta = 1 for neighbours, so eta^beta = 1
                    out.push(Candidate {
                        dir: d,
                        dist: 1,
                        landing: n,
                        weight: field.at(at, d),
                    });
                }
            }
        }
    }
}

/// `eta = 1 / manhattan(from, to)`.
pub fn heuristic(from: CellCoord, to: CellCoord) -> Result<f64> {
    match manhattan(from, to) {
        0 => Err(domain(format!(
            "heuristic undefined for identical cells {from}"
        ))),
        d => Ok(1.0 / d as f64),
    }
}

/// Picks a candidate index: greedy with probability `q0` (first maximum in
/// direction order), proportional sampling otherwise.
pub(crate) fn choose<R: Rng + ?Sized>(cands: &[Candidate], q0: f64, rng: &mut R) -> usize {
    debug_assert!(!cands.is_empty());
    let q: f64 = rng.random();
    if q <= q0 {
        let mut best = 0;
        for k in 1..cands.len() {
            if cands[k].weight > cands[best].weight {
                best = k;
            }
        }
        best
    } else {
        let total: f64 = cands.iter().map(|c| c.weight).sum();
        let mut r = rng.random::<f64>() * total;
        for (k, c) in cands.iter().enumerate() {
            if r < c.weight {
                return k;
            }
            r -= c.weight;
        }
        cands.len() - 1
    }
}

fn candidates_for(
    grid: &OccupancyGrid,
    field: &PheromoneField,
    state: &AntState,
    beta: f64,
    out: &mut Vec<Candidate>,
) {
    if state.velocity == 1 {
        UnitMoves.candidates(grid, field, &state.visited, state.current, beta, out);
    } else {
        FastMoves::new(state.velocity, beta).candidates(
            grid,
            field,
            &state.visited,
            state.current,
            beta,
            out,
        );
    }
}

/// Probability of each next cell under the proportional rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    pub direction: Direction,
    pub cell: CellCoord,
    pub probability: f64,
}

/// Distribution over the cells reachable in one move at the ant's velocity.
///
/// Moves whose landing cell is already visited are listed with probability 0.
/// Returns `None` when no unvisited candidate exists (dead end).
pub fn transition_probabilities(
    grid: &OccupancyGrid,
    field: &PheromoneField,
    state: &AntState,
    params: &SolverParams,
) -> Option<Vec<Transition>> {
    let mut open = Vec::with_capacity(4);
    candidates_for(grid, field, state, params.beta, &mut open);
    if open.is_empty() {
        return None;
    }
    let total: f64 = open.iter().map(|c| c.weight).sum();
    let mut out = Vec::with_capacity(4);
    for d in Direction::ALL {
        let landing = match open.iter().find(|c| c.dir == d) {
            Some(c) => {
                out.push(Transition {
                    direction: d,
                    cell: grid.coord_of(c.landing),
                    probability: c.weight / total,
                });
                continue;
            }
            None => crate::fasaco::landing(grid, state.current, d, state.velocity),
        };
        if let Some((n, _)) = landing {
            out.push(Transition {
                direction: d,
                cell: grid.coord_of(n),
                probability: 0.0,
            });
        }
    }
    Some(out)
}

/// Chooses the next landing cell with the pseudo-random-proportional rule.
/// `None` at a dead end.
pub fn select_next<R: Rng + ?Sized>(
    grid: &OccupancyGrid,
    field: &PheromoneField,
    state: &AntState,
    params: &SolverParams,
    rng: &mut R,
) -> Option<CellCoord> {
    let mut cands = Vec::with_capacity(4);
    candidates_for(grid, field, state, params.beta, &mut cands);
    if cands.is_empty() {
        return None;
    }
    let k = choose(&cands, params.q0, rng);
    Some(grid.coord_of(cands[k].landing))
}

/// BFS shortest path from the ant's cell to the nearest unvisited free cell,
/// excluding the current cell. `None` once nothing unvisited is reachable.
pub fn escape_dead_end(grid: &OccupancyGrid, state: &AntState) -> Option<Vec<CellCoord>> {
    let mut bfs = Bfs::new(grid.len());
    bfs.nearest(grid, state.current, |n| !state.visited[n])
        .map(|p| p.into_iter().map(|o| grid.coord_of(o)).collect())
}

/// Scratch buffers reused across the ants of one run.
pub(crate) struct Workspace {
    pub ant: AntState,
    pub start: usize,
    pub target: usize,
    bfs: Bfs,
    cands: Vec<Candidate>,
}

impl Workspace {
    pub fn new(grid: &OccupancyGrid, start: CellCoord) -> Result<Self> {
        let ant = AntState::new(grid, start, 1)?;
        let target = reachable_mask(grid, start).iter().filter(|&&r| r).count();
        Ok(Self {
            start: ant.current,
            ant,
            target,
            bfs: Bfs::new(grid.len()),
            cands: Vec::with_capacity(4),
        })
    }

    /// Builds one complete tour into `self.ant.path`; returns its step count.
    pub fn build<R: Rng + ?Sized>(
        &mut self,
        grid: &OccupancyGrid,
        field: &mut PheromoneField,
        params: &SolverParams,
        rng: &mut R,
        rule: &impl MoveRule,
    ) -> usize {
        self.ant.reset(self.start);
        let alpha = params.alpha;
        while self.ant.visited_count < self.target {
            rule.candidates(
                grid,
                field,
                &self.ant.visited,
                self.ant.current,
                params.beta,
                &mut self.cands,
            );
            if self.cands.is_empty() {
                let visited = &self.ant.visited;
                let Some(path) = self.bfs.nearest(grid, self.ant.current, |n| !visited[n]) else {
                    break;
                };
                for n in path {
                    let d = unit_direction(grid, self.ant.current, n);
                    self.ant.walk(grid, field, d, alpha);
                }
            } else {
                let c = self.cands[choose(&self.cands, params.q0, rng)];
                for _ in 0..c.dist {
                    self.ant.walk(grid, field, c.dir, alpha);
                }
            }
        }
        self.ant.path.len() - 1
    }
}

fn unit_direction(grid: &OccupancyGrid, from: usize, to: usize) -> Direction {
    let cols = grid.cols();
    if to + cols == from {
        Direction::Up
    } else if from + cols == to {
        Direction::Down
    } else if to + 1 == from {
        Direction::Left
    } else {
        debug_assert_eq!(from + 1, to);
        Direction::Right
    }
}

/// Builds one complete coverage tour, updating `field` after every unit edge.
pub fn construct_tour<R: Rng + ?Sized>(
    grid: &OccupancyGrid,
    field: &mut PheromoneField,
    params: &SolverParams,
    rng: &mut R,
    start: CellCoord,
    velocity: usize,
) -> Result<Tour> {
    params.validate()?;
    check_field(grid, field)?;
    let mut ws = Workspace::new(grid, start)?;
    if velocity == 0 {
        return Err(parameter("velocity must be at least 1"));
    }
    if velocity == 1 {
        ws.build(grid, field, params, rng, &UnitMoves);
    } else {
        ws.build(
            grid,
            field,
            params,
            rng,
            &FastMoves::new(velocity, params.beta),
        );
    }
    Ok(Tour::from_offsets(grid, &ws.ant.path))
}

pub(crate) fn check_field(grid: &OccupancyGrid, field: &PheromoneField) -> Result<()> {
    if field.rows() != grid.rows() || field.cols() != grid.cols() {
        return Err(domain(format!(
            "pheromone field is {}x{} but grid is {}x{}",
            field.rows(),
            field.cols(),
            grid.rows(),
            grid.cols()
        )));
    }
    Ok(())
}

/// Outcome of a colony run.
#[derive(Debug, Clone, PartialEq)]
pub struct ColonyRun {
    pub best: Tour,
    /// Step count of every ant in construction order.
    pub ant_steps: Vec<usize>,
}

/// Runs `params.ants` velocity-1 ants per wave on `field`, depositing along
/// the best tour so far after each wave.
pub fn run_aco_on<R: Rng + ?Sized>(
    grid: &OccupancyGrid,
    field: &mut PheromoneField,
    params: &SolverParams,
    rng: &mut R,
    start: CellCoord,
) -> Result<ColonyRun> {
    params.validate()?;
    check_field(grid, field)?;
    let mut ws = Workspace::new(grid, start)?;
    let mut best: Option<Tour> = None;
    let mut ant_steps = Vec::with_capacity(params.ants * params.iterations);
    for _ in 0..params.iterations {
        for _ in 0..params.ants {
            let steps = ws.build(grid, field, params, rng, &UnitMoves);
            ant_steps.push(steps);
            if best.as_ref().is_none_or(|b| steps < b.steps()) {
                best = Some(Tour::from_offsets(grid, &ws.ant.path));
            }
        }
        let b = best.as_ref().expect("at least one ant ran");
        field.global_deposit(b, params.alpha, params.quality)?;
    }
    Ok(ColonyRun {
        best: best.expect("at least one ant ran"),
        ant_steps,
    })
}

/// Classic ACO on a fresh field; returns the best (fewest-steps) tour.
pub fn run_aco<R: Rng + ?Sized>(
    grid: &OccupancyGrid,
    params: &SolverParams,
    rng: &mut R,
    start: CellCoord,
) -> Result<Tour> {
    let mut field = PheromoneField::for_grid(grid, params.tau0)?;
    Ok(run_aco_on(grid, &mut field, params, rng, start)?.best)
}
