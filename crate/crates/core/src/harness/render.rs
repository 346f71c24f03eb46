//! SVG figures: coverage paths and pheromone heat maps.

use std::fmt::Write as _;

use crate::colony::Tour;
use crate::error::{domain, Result};
use crate::gridmap::{CellCoord, CellState, Direction, OccupancyGrid};
use crate::pheromone::PheromoneField;

const CELL: usize = 12;

fn header(out: &mut String, grid: &OccupancyGrid) {
    let (w, h) = (grid.cols() * CELL, grid.rows() * CELL);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(
        out,
        r##"<rect x="0" y="0" width="{w}" height="{h}" fill="#ffffff"/>"##
    );
}

fn blocked_cells(out: &mut String, grid: &OccupancyGrid) {
    for i in 1..=grid.rows() {
        for j in 1..=grid.cols() {
            let c = CellCoord::new(i, j);
            if grid.is_free(c) {
                continue;
            }
            let (class, fill) = match grid.state(c).expect("cell on grid") {
                CellState::Unknown => ("unknown", "#9a9a9a"),
                _ => ("occupied", "#222222"),
            };
            let _ = writeln!(
                out,
                r#"<rect class="{class}" x="{}" y="{}" width="{CELL}" height="{CELL}" fill="{fill}"/>"#,
                (j - 1) * CELL,
                (i - 1) * CELL
            );
        }
    }
}

fn centre(c: CellCoord) -> (f64, f64) {
    (
        (c.j - 1) as f64 * CELL as f64 + CELL as f64 / 2.0,
        (c.i - 1) as f64 * CELL as f64 + CELL as f64 / 2.0,
    )
}

/// Map with the tour drawn as a polyline through cell centres and one arrow
/// per step, placed in the entered cell and pointing along the motion.
pub fn render_svg(grid: &OccupancyGrid, tour: &Tour) -> Result<String> {
    if let Some(bad) = tour.cells().iter().find(|c| !grid.contains(**c)) {
        return Err(domain(format!("tour cell {bad} lies outside the map")));
    }
    let mut out = String::new();
    header(&mut out, grid);
    blocked_cells(&mut out, grid);
    if tour.len() >= 2 {
        let pts: Vec<String> = tour
            .cells()
            .iter()
            .map(|&c| {
                let (x, y) = centre(c);
                format!("{x:.1},{y:.1}")
            })
            .collect();
        let _ = writeln!(
            out,
            r##"<polyline class="path" points="{}" fill="none" stroke="#1f4fd8" stroke-width="2"/>"##,
            pts.join(" ")
        );
        let half = CELL as f64 * 0.3;
        for w in tour.cells().windows(2) {
            let (x, y) = centre(w[1]);
            let d = Direction::between(w[0], w[1]);
            let (dx, dy) = match d {
                Some(d) => {
                    let (di, dj) = d.delta();
                    (dj as f64, di as f64)
                }
                None => (0.0, 0.0),
            };
            // triangle: tip ahead of the centre, base behind it
            let (tx, ty) = (x + dx * half, y + dy * half);
            let (bx, by) = (x - dx * half * 0.5, y - dy * half * 0.5);
            let (px, py) = (-dy * half * 0.6, dx * half * 0.6);
            let _ = writeln!(
                out,
                r##"<path class="arrow" d="M{tx:.1},{ty:.1} L{:.1},{:.1} L{:.1},{:.1} Z" fill="#d62728"/>"##,
                bx + px,
                by + py,
                bx - px,
                by - py
            );
        }
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Heat map of the summed outgoing pheromone per free cell, min-max
/// normalized over free cells. Each free cell carries its normalized value
/// in a `data-heat` attribute; brighter colours mean more pheromone.
pub fn render_pheromone_heatmap(field: &PheromoneField, grid: &OccupancyGrid) -> Result<String> {
    if field.rows() != grid.rows() || field.cols() != grid.cols() {
        return Err(domain(format!(
            "field is {}x{} but grid is {}x{}",
            field.rows(),
            field.cols(),
            grid.rows(),
            grid.cols()
        )));
    }
    let totals = field.cell_totals();
    let free: Vec<usize> = (0..grid.len()).filter(|&o| grid.is_open(o)).collect();
    let lo = free
        .iter()
        .map(|&o| totals[o])
        .fold(f64::INFINITY, f64::min);
    let hi = free
        .iter()
        .map(|&o| totals[o])
        .fold(f64::NEG_INFINITY, f64::max);
    let mut out = String::new();
    header(&mut out, grid);
    blocked_cells(&mut out, grid);
    for o in free {
        let x = if hi > lo {
            (totals[o] - lo) / (hi - lo)
        } else {
            0.0
        };
        let lerp = |a: f64, b: f64| (a + (b - a) * x).round() as u8;
        let c = grid.coord_of(o);
        let _ = writeln!(
            out,
            r#"<rect class="heat" x="{}" y="{}" width="{CELL}" height="{CELL}" fill="rgb({},{},{})" data-heat="{x:.6}"/>"#,
            (c.j - 1) * CELL,
            (c.i - 1) * CELL,
            lerp(40.0, 255.0),
            lerp(20.0, 220.0),
            lerp(80.0, 60.0),
        );
    }
    out.push_str("</svg>\n");
    Ok(out)
}
