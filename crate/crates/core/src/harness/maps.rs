//! Stand-in benchmark maps shipped with the crate.
//!
//! - `office`: a 22x34 office floor with desks, a partition wall and an
//!   unmapped corner.
//! - `simulated`: a 32x32 random obstacle field from the seeded generator.
//! - `basement`: a 74x112 basement (28 m x 18.5 m at 0.25 m per cell) with
//!   rooms off a pillared corridor.

use crate::error::{parameter, Result};
use crate::gridmap::{parse_ascii_map, OccupancyGrid};

use super::generate_random_map;

pub const BUILTIN_NAMES: [&str; 3] = ["office", "simulated", "basement"];

const OFFICE: &str = include_str!("../../maps/office.txt");
const BASEMENT: &str = include_str!("../../maps/basement.txt");

pub fn builtin(name: &str) -> Result<OccupancyGrid> {
    match name {
        "office" => parse_ascii_map(OFFICE)?.with_resolution(0.05),
        "simulated" => generate_random_map(32, 32, 0.15, 2023),
        "basement" => parse_ascii_map(BASEMENT)?.with_resolution(0.25),
        other => Err(parameter(format!(
            "unknown builtin map {other:?}; expected one of {BUILTIN_NAMES:?}"
        ))),
    }
}
