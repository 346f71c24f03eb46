//! Coverage quality and planning cost.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::colony::Tour;
use crate::gridmap::OccupancyGrid;
use crate::search::reachable_mask;

/// Metrics for one planned tour.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    /// Distinct cells entered two or more times.
    pub n_r: usize,
    /// CPU seconds spent in the planner.
    pub t_o: f64,
    pub steps: usize,
    /// Free cells reachable from the tour's first cell.
    pub free_cells: usize,
    pub covered: bool,
}

impl CoverageReport {
    pub fn new(grid: &OccupancyGrid, tour: &Tour, t_o: f64) -> Self {
        let free_cells = tour
            .cells()
            .first()
            .map(|&s| reachable_mask(grid, s).iter().filter(|&&r| r).count())
            .unwrap_or(0);
        Self {
            n_r: recovered_cells(tour),
            t_o,
            steps: tour.steps(),
            free_cells,
            covered: coverage_complete(tour, grid),
        }
    }
}

/// Number of distinct cells that appear at least twice in the tour.
pub fn recovered_cells(tour: &Tour) -> usize {
    let mut counts: HashMap<_, usize> = HashMap::with_capacity(tour.len());
    for &c in tour.cells() {
        *counts.entry(c).or_default() += 1;
    }
    counts.values().filter(|&&n| n >= 2).count()
}

/// Total entries beyond the first per cell.
pub fn excess_visits(tour: &Tour) -> usize {
    let mut counts: HashMap<_, usize> = HashMap::with_capacity(tour.len());
    for &c in tour.cells() {
        *counts.entry(c).or_default() += 1;
    }
    counts.values().map(|&n| n - 1).sum()
}

/// True iff the tour's distinct cells are exactly the free cells reachable
/// from its first cell, and it only ever stands on free cells.
pub fn coverage_complete(tour: &Tour, grid: &OccupancyGrid) -> bool {
    let Some(&first) = tour.cells().first() else {
        return false;
    };
    let reach = reachable_mask(grid, first);
    let mut seen = vec![false; grid.len()];
    let mut distinct = 0;
    for &c in tour.cells() {
        let Ok(off) = grid.offset(c) else {
            return false;
        };
        if !reach[off] {
            return false;
        }
        if !seen[off] {
            seen[off] = true;
            distinct += 1;
        }
    }
    distinct == reach.iter().filter(|&&r| r).count()
}

/// CPU time of the calling thread, in seconds.
///
/// Planners are single-threaded, so this is the CPU cost of a planning call
/// even when several calls run concurrently on other threads.
pub fn thread_cpu_seconds() -> f64 {
    let mut ts = libc::timespec {
        tv_sec: 0,
        tv_nsec: 0,
    };
    // SAFETY: `ts` is a valid out-pointer; CLOCK_THREAD_CPUTIME_ID is supported on Linux.
    let rc = unsafe { libc::clock_gettime(libc::CLOCK_THREAD_CPUTIME_ID, &mut ts) };
    if rc != 0 {
        return 0.0;
    }
    ts.tv_sec as f64 + ts.tv_nsec as f64 * 1e-9
}

/// Runs `f` and returns its result with the CPU seconds it consumed.
pub fn measure_cpu_time<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let t0 = thread_cpu_seconds();
    let out = f();
    let dt = (thread_cpu_seconds() - t0).max(0.0);
    (out, dt)
}
