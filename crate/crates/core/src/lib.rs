//! Coverage path planning on occupancy grid maps.
//!
//! Planners:
//! - [`fasaco`]: ant colony optimisation with velocity cohorts,
//! - [`colony`]: classic single-velocity ant colony optimisation,
//! - [`baselines`]: Spiral-STC and ZigZag.
//!
//! [`harness`] runs and aggregates benchmark suites and renders SVG figures;
//! [`cli`] is the command-line front end.

pub mod baselines;
pub mod cli;
pub mod colony;
pub mod error;
pub mod fasaco;
pub mod gridmap;
pub mod harness;
pub mod metrics;
pub mod pheromone;
pub mod search;

pub use baselines::{spiral_stc, zigzag, zigzag_with, SweepOrientation};
pub use colony::{
    construct_tour, escape_dead_end, heuristic, run_aco, run_aco_on, select_next,
    transition_probabilities, AntState, ColonyRun, SolverParams, Tour, Transition,
};
pub use error::{Error, Result};
pub use fasaco::{
    fast_move, run_fasaco, run_fasaco_on, split_cohorts, Cohort, FastMove, VelocitySchedule,
};
pub use gridmap::{
    cell_coords, cell_index, manhattan, neighbors, parse_ascii_map, parse_pgm_map, CellCoord,
    CellState, Direction, MotionModel, OccupancyGrid,
};
pub use harness::{
    generate_random_map, plan, render_pheromone_heatmap, render_svg, run_experiment_suite,
    Algorithm, ExperimentConfig, MapSource, PlanOutcome, ResultTable,
};
pub use metrics::{coverage_complete, measure_cpu_time, recovered_cells, CoverageReport};
pub use pheromone::PheromoneField;
