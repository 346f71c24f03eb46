use pyo3::exceptions::{PyIOError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use fasaco::harness::maps;
use fasaco::{Algorithm, CellCoord, Error, OccupancyGrid, SolverParams, Tour, VelocitySchedule};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Io(m) => PyIOError::new_err(m),
        Error::Generation(m) => PyRuntimeError::new_err(m),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn tour_of(cells: Vec<(usize, usize)>) -> Tour {
    Tour::new(
        cells
            .into_iter()
            .map(|(i, j)| CellCoord::new(i, j))
            .collect(),
    )
}

fn cells_of(tour: &Tour) -> Vec<(usize, usize)> {
    tour.cells().iter().map(|c| (c.i, c.j)).collect()
}

/// Occupancy grid; cells are addressed by 1-based `(row, column)` pairs.
#[pyclass(module = "pyfasaco", frozen)]
struct Grid {
    inner: OccupancyGrid,
}

#[pymethods]
impl Grid {
    #[staticmethod]
    fn from_ascii(text: &str) -> PyResult<Self> {
        let inner = fasaco::parse_ascii_map(text).map_err(to_py)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    #[pyo3(signature = (data, occupied=fasaco::gridmap::DEFAULT_OCCUPIED_THRESHOLD, free=fasaco::gridmap::DEFAULT_FREE_THRESHOLD))]
    fn from_pgm(data: &[u8], occupied: f64, free: f64) -> PyResult<Self> {
        let inner = fasaco::parse_pgm_map(data, occupied, free).map_err(to_py)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn open(rows: usize, cols: usize) -> PyResult<Self> {
        let inner = OccupancyGrid::open(rows, cols).map_err(to_py)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn random(rows: usize, cols: usize, density: f64, seed: u64) -> PyResult<Self> {
        generate_random_map(rows, cols, density, seed)
    }

    /// One of the bundled maps: "office", "simulated" or "basement".
    #[staticmethod]
    fn builtin(name: &str) -> PyResult<Self> {
        let inner = maps::builtin(name).map_err(to_py)?;
        Ok(Self { inner })
    }

    #[getter]
    fn rows(&self) -> usize {
        self.inner.rows()
    }

    #[getter]
    fn cols(&self) -> usize {
        self.inner.cols()
    }

    #[getter]
    fn free_count(&self) -> usize {
        self.inner.free_count()
    }

    fn is_free(&self, i: usize, j: usize) -> bool {
        self.inner.is_free(CellCoord::new(i, j))
    }

    fn free_cells(&self) -> Vec<(usize, usize)> {
        self.inner
            .free_cells()
            .into_iter()
            .map(|c| (c.i, c.j))
            .collect()
    }

    /// Column-major linear index of a cell, starting at 1.
    fn cell_index(&self, i: usize, j: usize) -> PyResult<usize> {
        self.inner.cell_index(CellCoord::new(i, j)).map_err(to_py)
    }

    fn cell_coords(&self, u: usize) -> PyResult<(usize, usize)> {
        let c = self.inner.cell_coords(u).map_err(to_py)?;
        Ok((c.i, c.j))
    }

    fn to_ascii(&self) -> String {
        self.inner.to_ascii()
    }

    fn __repr__(&self) -> String {
        format!(
            "Grid(rows={}, cols={}, free={})",
            self.inner.rows(),
            self.inner.cols(),
            self.inner.free_count()
        )
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }
}

#[pyclass(module = "pyfasaco", frozen, get_all)]
struct PlanResult {
    tour: Vec<(usize, usize)>,
    n_r: usize,
    steps: usize,
    t_o: f64,
    covered: bool,
    free_cells: usize,
}

#[pymethods]
impl PlanResult {
    fn __repr__(&self) -> String {
        format!(
            "PlanResult(n_r={}, steps={}, t_o={:.6}, covered={})",
            self.n_r,
            self.steps,
            self.t_o,
            if self.covered { "True" } else { "False" }
        )
    }
}

/// Plans a coverage tour. `algorithm` is one of "fasaco", "aco",
/// "spiral-stc" or "zigzag".
#[pyfunction]
#[pyo3(signature = (
    grid,
    algorithm="fasaco",
    schedule="decreasing:8..1",
    ants=fasaco::colony::DEFAULT_ANTS,
    seed=0,
    beta=fasaco::colony::DEFAULT_BETA,
    q0=fasaco::colony::DEFAULT_Q0,
    alpha=fasaco::colony::DEFAULT_ALPHA,
    tau0=fasaco::colony::DEFAULT_TAU0,
    quality=fasaco::colony::DEFAULT_QUALITY,
    iterations=1,
    start=None,
))]
#[allow(clippy::too_many_arguments)]
fn plan(
    py: Python<'_>,
    grid: &Grid,
    algorithm: &str,
    schedule: &str,
    ants: usize,
    seed: u64,
    beta: f64,
    q0: f64,
    alpha: f64,
    tau0: f64,
    quality: f64,
    iterations: usize,
    start: Option<(usize, usize)>,
) -> PyResult<PlanResult> {
    let schedule: VelocitySchedule = schedule.parse().map_err(to_py)?;
    let algorithm = Algorithm::from_name(algorithm, Some(schedule)).map_err(to_py)?;
    let params = SolverParams {
        beta,
        q0,
        alpha,
        tau0,
        quality,
        ants,
        iterations,
        seed,
    };
    let start = start.map(|(i, j)| CellCoord::new(i, j));
    let grid = &grid.inner;
    let out = py
        .detach(|| fasaco::plan(grid, &algorithm, &params, start))
        .map_err(to_py)?;
    Ok(PlanResult {
        tour: cells_of(&out.tour),
        n_r: out.report.n_r,
        steps: out.report.steps,
        t_o: out.report.t_o,
        covered: out.report.covered,
        free_cells: out.report.free_cells,
    })
}

#[pyfunction]
fn recovered_cells(tour: Vec<(usize, usize)>) -> usize {
    fasaco::recovered_cells(&tour_of(tour))
}

#[pyfunction]
fn coverage_complete(tour: Vec<(usize, usize)>, grid: &Grid) -> bool {
    fasaco::coverage_complete(&tour_of(tour), &grid.inner)
}

#[pyfunction]
fn generate_random_map(rows: usize, cols: usize, density: f64, seed: u64) -> PyResult<Grid> {
    let inner = fasaco::generate_random_map(rows, cols, density, seed).map_err(to_py)?;
    Ok(Grid { inner })
}

#[pyfunction]
#[pyo3(signature = (grid, tour=Vec::new()))]
fn render_svg(grid: &Grid, tour: Vec<(usize, usize)>) -> PyResult<String> {
    fasaco::render_svg(&grid.inner, &tour_of(tour)).map_err(to_py)
}

/// `(velocity, ants)` per cohort.
#[pyfunction]
fn split_cohorts(ants: usize, schedule: &str) -> PyResult<Vec<(usize, usize)>> {
    let schedule: VelocitySchedule = schedule.parse().map_err(to_py)?;
    let cohorts = fasaco::split_cohorts(ants, &schedule).map_err(to_py)?;
    Ok(cohorts.into_iter().map(|c| (c.velocity, c.ants)).collect())
}

#[pymodule]
fn pyfasaco(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Grid>()?;
    m.add_class::<PlanResult>()?;
    m.add_function(wrap_pyfunction!(plan, m)?)?;
    m.add_function(wrap_pyfunction!(recovered_cells, m)?)?;
    m.add_function(wrap_pyfunction!(coverage_complete, m)?)?;
    m.add_function(wrap_pyfunction!(generate_random_map, m)?)?;
    m.add_function(wrap_pyfunction!(render_svg, m)?)?;
    m.add_function(wrap_pyfunction!(split_cohorts, m)?)?;
    m.add("BUILTIN_MAPS", maps::BUILTIN_NAMES.to_vec())?;
    Ok(())
}
