//! Pheromone intensities on directed unit edges between 4-adjacent cells.
//!
//! Every cell owns four outgoing entries, one per [`Direction`]. The same
//! storage serves the per-move trail and the end-of-wave deposit.

use std::fmt::Write as _;

use crate::colony::Tour;
use crate::error::{domain, parameter, Result};
use crate::gridmap::{CellCoord, Direction, OccupancyGrid};

#[derive(Debug, Clone, PartialEq)]
pub struct PheromoneField {
    rows: usize,
    cols: usize,
    tau0: f64,
    tau: Vec<f64>,
}

impl PheromoneField {
    /// Every edge starts at `tau0`.
    pub fn new(rows: usize, cols: usize, tau0: f64) -> Result<Self> {
        Self::with_initial(rows, cols, tau0, tau0)
    }

    /// Every edge starts at `initial`; local updates pull edges towards `tau0`.
    pub fn with_initial(rows: usize, cols: usize, tau0: f64, initial: f64) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(domain("pheromone field needs positive dimensions"));
        }
        if !(tau0 > 0.0 && tau0.is_finite()) {
            return Err(parameter(format!("tau0 must be positive, got {tau0}")));
        }
        if !(initial > 0.0 && initial.is_finite()) {
            return Err(parameter(format!(
                "initial pheromone must be positive, got {initial}"
            )));
        }
        Ok(Self {
            rows,
            cols,
            tau0,
            tau: vec![initial; rows * cols * 4],
        })
    }

    pub fn for_grid(grid: &OccupancyGrid, tau0: f64) -> Result<Self> {
        Self::new(grid.rows(), grid.cols(), tau0)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn tau0(&self) -> f64 {
        self.tau0
    }

    /// Raw entries, indexed `row_major_offset * 4 + direction`.
    pub fn entries(&self) -> &[f64] {
        &self.tau
    }

    fn edge(&self, from: CellCoord, to: CellCoord) -> Result<usize> {
        let inside = |c: CellCoord| c.i >= 1 && c.i <= self.rows && c.j >= 1 && c.j <= self.cols;
        if !inside(from) || !inside(to) {
            return Err(domain(format!(
                "edge {from}->{to} leaves the {}x{} field",
                self.rows, self.cols
            )));
        }
        let d = Direction::between(from, to)
            .ok_or_else(|| domain(format!("cells {from} and {to} are not 4-adjacent")))?;
        Ok(((from.i - 1) * self.cols + (from.j - 1)) * 4 + d.index())
    }

    /// Intensity on the directed edge `from -> to`.
    pub fn tau(&self, from: CellCoord, to: CellCoord) -> Result<f64> {
        Ok(self.tau[self.edge(from, to)?])
    }

    /// `tau <- (1 - alpha) * tau + alpha * tau0` on one directed edge.
    pub fn local_update(&mut self, from: CellCoord, to: CellCoord, alpha: f64) -> Result<f64> {
        check_alpha(alpha)?;
        let e = self.edge(from, to)?;
        self.tau[e] = (1.0 - alpha) * self.tau[e] + alpha * self.tau0;
        Ok(self.tau[e])
    }

    /// Reinforces every edge the tour traverses, once per traversal:
    /// `phi <- (1 - alpha) * phi + alpha * quality / steps`.
    pub fn global_deposit(&mut self, best: &Tour, alpha: f64, quality: f64) -> Result<()> {
        check_alpha(alpha)?;
        if !(quality > 0.0 && quality.is_finite()) {
            return Err(parameter(format!(
                "deposit quality must be positive, got {quality}"
            )));
        }
        let cells = best.cells();
        if cells.is_empty() {
            return Err(domain("cannot deposit along an empty tour"));
        }
        // a single-cell tour has no edges to reinforce
        if cells.len() == 1 {
            return Ok(());
        }
        let edges = cells
            .windows(2)
            .map(|w| self.edge(w[0], w[1]))
            .collect::<Result<Vec<_>>>()?;
        let delta = quality / best.steps() as f64;
        for e in edges {
            self.tau[e] = (1.0 - alpha) * self.tau[e] + alpha * delta;
        }
        Ok(())
    }

    #[inline]
    pub(crate) fn at(&self, off: usize, d: Direction) -> f64 {
        self.tau[off * 4 + d.index()]
    }

    /// Local update addressed by offset; `alpha` is validated by the caller.
    #[inline]
    pub(crate) fn touch(&mut self, off: usize, d: Direction, alpha: f64) {
        let e = off * 4 + d.index();
        self.tau[e] = (1.0 - alpha) * self.tau[e] + alpha * self.tau0;
    }

    /// Sum of a cell's four outgoing entries, row-major.
    pub fn cell_totals(&self) -> Vec<f64> {
        self.tau.chunks_exact(4).map(|c| c.iter().sum()).collect()
    }

    /// CSV with columns `cell,direction,intensity`; `cell` is the 1-based
    /// column-major linear index.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("cell,direction,intensity\n");
        for j in 1..=self.cols {
            for i in 1..=self.rows {
                let off = (i - 1) * self.cols + (j - 1);
                let u = (j - 1) * self.rows + i;
                for d in Direction::ALL {
                    let _ = writeln!(out, "{u},{},{}", d.name(), self.at(off, d));
                }
            }
        }
        out
    }
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(parameter(format!("alpha must lie in (0, 1), got {alpha}")))
    }
}
