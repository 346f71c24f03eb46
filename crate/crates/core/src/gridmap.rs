//! Occupancy grid environment model.
//!
//! A map is an `rows × cols` array of occupancy probabilities. Public
//! coordinates are 1-based `(i, j)` = (row, column). The public linear index
//! is column-major, `u = (j - 1) * rows + i`, so on a 7-row map cell `(3, 5)`
//! is `m_31` and `(1, 6)` is `m_36`.
//!
//! Internally cells are addressed by a 0-based row-major offset
//! (`(i - 1) * cols + (j - 1)`), which is what the planners iterate over.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{domain, format, Result};

/// Default PGM threshold above which a pixel is treated as occupied.
pub const DEFAULT_OCCUPIED_THRESHOLD: f64 = 0.65;
/// Default PGM threshold below which a pixel is treated as free.
pub const DEFAULT_FREE_THRESHOLD: f64 = 0.196;

/// A cell address, 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CellCoord {
    pub i: usize,
    pub j: usize,
}

impl CellCoord {
    pub const fn new(i: usize, j: usize) -> Self {
        Self { i, j }
    }
}

impl fmt::Display for CellCoord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.i, self.j)
    }
}

/// Classification of a cell by its occupancy probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CellState {
    Free,
    Occupied,
    Unknown,
    Probabilistic(f64),
}

impl CellState {
    pub fn from_probability(p: f64) -> Self {
        if p == 0.0 {
            CellState::Free
        } else if p == 1.0 {
            CellState::Occupied
        } else if p == 0.5 {
            CellState::Unknown
        } else {
            CellState::Probabilistic(p)
        }
    }

    /// Whether a planner may enter (and must cover) a cell in this state.
    ///
    /// Unknown cells are never entered; probabilistic cells are entered when
    /// more likely free than occupied.
    pub fn is_traversable(self) -> bool {
        match self {
            CellState::Free => true,
            CellState::Occupied | CellState::Unknown => false,
            CellState::Probabilistic(p) => p < 0.5,
        }
    }
}

/// One of the four motion directions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    Up,
    Down,
    Left,
    Right,
}

impl Direction {
    /// Fixed order used everywhere ties must be broken.
    pub const ALL: [Direction; 4] = [
        Direction::Up,
        Direction::Down,
        Direction::Left,
        Direction::Right,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(k: usize) -> Direction {
        Self::ALL[k]
    }

    pub fn opposite(self) -> Direction {
        match self {
            Direction::Up => Direction::Down,
            Direction::Down => Direction::Up,
            Direction::Left => Direction::Right,
            Direction::Right => Direction::Left,
        }
    }

    /// Row and column deltas of a unit step.
    pub fn delta(self) -> (isize, isize) {
        match self {
            Direction::Up => (-1, 0),
            Direction::Down => (1, 0),
            Direction::Left => (0, -1),
            Direction::Right => (0, 1),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Direction::Up => "up",
            Direction::Down => "down",
            Direction::Left => "left",
            Direction::Right => "right",
        }
    }

    /// Direction of the unit step `from -> to`, if the cells are 4-adjacent.
    pub fn between(from: CellCoord, to: CellCoord) -> Option<Direction> {
        let di = to.i as isize - from.i as isize;
        let dj = to.j as isize - from.j as isize;
        Self::ALL.into_iter().find(|d| d.delta() == (di, dj))
    }
}

/// 4-connected unit-velocity motion model.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MotionModel;

impl MotionModel {
    pub fn directions(&self) -> [Direction; 4] {
        Direction::ALL
    }
}

/// Occupancy grid map. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct OccupancyGrid {
    rows: usize,
    cols: usize,
    resolution: f64,
    probs: Vec<f64>,
    open: Vec<bool>,
    // open neighbour offsets per direction, NO_LINK where blocked
    links: Vec<[u32; 4]>,
}

const NO_LINK: u32 = u32::MAX;

impl OccupancyGrid {
    /// Builds a grid from row-major probabilities.
    pub fn new(rows: usize, cols: usize, resolution: f64, probs: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(domain(format!(
                "grid dimensions must be positive, got {rows}x{cols}"
            )));
        }
        if !(resolution > 0.0 && resolution.is_finite()) {
            return Err(domain(format!(
                "resolution must be positive, got {resolution}"
            )));
        }
        if probs.len() != rows * cols {
            return Err(domain(format!(
                "expected {} probabilities for a {rows}x{cols} grid, got {}",
                rows * cols,
                probs.len()
            )));
        }
        if let Some(p) = probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(domain(format!("occupancy probability {p} outside [0, 1]")));
        }
        if rows * cols >= NO_LINK as usize {
            return Err(domain(format!("{rows}x{cols} grid is too large")));
        }
        let open: Vec<bool> = probs
            .iter()
            .map(|&p| CellState::from_probability(p).is_traversable())
            .collect();
        let mut grid = Self {
            rows,
            cols,
            resolution,
            probs,
            open,
            links: Vec::new(),
        };
        grid.links = (0..rows * cols)
            .map(|o| {
                Direction::ALL.map(|d| {
                    grid.step(o, d)
                        .filter(|&n| grid.open[n])
                        .map_or(NO_LINK, |n| n as u32)
                })
            })
            .collect();
        Ok(grid)
    }

    /// All cells free.
    pub fn open(rows: usize, cols: usize) -> Result<Self> {
        Self::new(rows, cols, 1.0, vec![0.0; rows * cols])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn with_resolution(mut self, resolution: f64) -> Result<Self> {
        if !(resolution > 0.0 && resolution.is_finite()) {
            return Err(domain(format!(
                "resolution must be positive, got {resolution}"
            )));
        }
        self.resolution = resolution;
        Ok(self)
    }

    /// Row-major probabilities.
    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn contains(&self, c: CellCoord) -> bool {
        c.i >= 1 && c.i <= self.rows && c.j >= 1 && c.j <= self.cols
    }

    pub fn probability(&self, c: CellCoord) -> Result<f64> {
        Ok(self.probs[self.offset(c)?])
    }

    pub fn state(&self, c: CellCoord) -> Result<CellState> {
        Ok(CellState::from_probability(self.probability(c)?))
    }

    pub fn is_free(&self, c: CellCoord) -> bool {
        self.contains(c) && self.open[self.offset_unchecked(c)]
    }

    /// Number of traversable cells in the whole grid.
    pub fn free_count(&self) -> usize {
        self.open.iter().filter(|&&o| o).count()
    }

    /// Free cells in public linear-index order.
    pub fn free_cells(&self) -> Vec<CellCoord> {
        let mut out = Vec::new();
        for j in 1..=self.cols {
            for i in 1..=self.rows {
                let c = CellCoord::new(i, j);
                if self.is_free(c) {
                    out.push(c);
                }
            }
        }
        out
    }

    /// `(1, 1)` if free, else the free cell with the smallest linear index.
    pub fn default_start(&self) -> Option<CellCoord> {
        let origin = CellCoord::new(1, 1);
        if self.is_free(origin) {
            return Some(origin);
        }
        self.free_cells().into_iter().next()
    }

    pub fn cell_index(&self, c: CellCoord) -> Result<usize> {
        if !self.contains(c) {
            return Err(domain(format!(
                "cell {c} outside {}x{} grid",
                self.rows, self.cols
            )));
        }
        cell_index(c, self.rows)
    }

    pub fn cell_coords(&self, u: usize) -> Result<CellCoord> {
        if u == 0 || u > self.len() {
            return Err(domain(format!(
                "linear index {u} outside 1..={}",
                self.len()
            )));
        }
        cell_coords(u, self.rows)
    }

    /// Serializes back to the `.`/`#`/`?` text format, rows joined by `\n`.
    ///
    /// Probabilistic cells are written as `.` or `#` by traversability.
    pub fn to_ascii(&self) -> String {
        let mut s = String::with_capacity(self.rows * (self.cols + 1));
        for r in 0..self.rows {
            if r > 0 {
                s.push('\n');
            }
            for c in 0..self.cols {
                let off = r * self.cols + c;
                s.push(match CellState::from_probability(self.probs[off]) {
                    CellState::Unknown => '?',
                    CellState::Free => '.',
                    CellState::Occupied => '#',
                    CellState::Probabilistic(_) => {
                        if self.open[off] {
                            '.'
                        } else {
                            '#'
                        }
                    }
                });
            }
        }
        s
    }

    // ---- offset plumbing used by the planners ----

    pub(crate) fn offset(&self, c: CellCoord) -> Result<usize> {
        if !self.contains(c) {
            return Err(domain(format!(
                "cell {c} outside {}x{} grid",
                self.rows, self.cols
            )));
        }
        Ok(self.offset_unchecked(c))
    }

    #[inline]
    pub(crate) fn offset_unchecked(&self, c: CellCoord) -> usize {
        (c.i - 1) * self.cols + (c.j - 1)
    }

    #[inline]
    pub(crate) fn coord_of(&self, off: usize) -> CellCoord {
        CellCoord::new(off / self.cols + 1, off % self.cols + 1)
    }

    #[inline]
    pub(crate) fn is_open(&self, off: usize) -> bool {
        self.open[off]
    }

    /// Offset of the cell one step from `off`, if on the map.
    #[inline]
    pub(crate) fn step(&self, off: usize, d: Direction) -> Option<usize> {
        let r = off / self.cols;
        let c = off % self.cols;
        match d {
            Direction::Up => (r > 0).then(|| off - self.cols),
            Direction::Down => (r + 1 < self.rows).then(|| off + self.cols),
            Direction::Left => (c > 0).then(|| off - 1),
            Direction::Right => (c + 1 < self.cols).then(|| off + 1),
        }
    }

    /// Offset of the open cell one step from `off`.
    #[inline]
    pub(crate) fn open_step(&self, off: usize, d: Direction) -> Option<usize> {
        let n = self.links[off][d.index()];
        (n != NO_LINK).then_some(n as usize)
    }

    /// Column-major linear index of an offset, for deterministic tie-breaks.
    #[inline]
    pub(crate) fn linear_of(&self, off: usize) -> usize {
        (off % self.cols) * self.rows + off / self.cols + 1
    }
}

/// Column-major linear index `u = (j - 1) * rows + i`.
pub fn cell_index(c: CellCoord, rows: usize) -> Result<usize> {
    if c.i == 0 || c.j == 0 || c.i > rows {
        return Err(domain(format!(
            "cell {c} invalid for a grid with {rows} rows"
        )));
    }
    Ok((c.j - 1) * rows + c.i)
}

/// Inverse of [`cell_index`].
pub fn cell_coords(u: usize, rows: usize) -> Result<CellCoord> {
    if u == 0 || rows == 0 {
        return Err(domain(format!(
            "linear index {u} invalid for a grid with {rows} rows"
        )));
    }
    Ok(CellCoord::new((u - 1) % rows + 1, (u - 1) / rows + 1))
}

pub fn manhattan(a: CellCoord, b: CellCoord) -> usize {
    a.i.abs_diff(b.i) + a.j.abs_diff(b.j)
}

/// Adjacent free cells of `at`, in `[Up, Down, Left, Right]` order.
pub fn neighbors(grid: &OccupancyGrid, at: CellCoord, model: &MotionModel) -> Vec<CellCoord> {
    let Ok(off) = grid.offset(at) else {
        return Vec::new();
    };
    model
        .directions()
        .into_iter()
        .filter_map(|d| grid.open_step(off, d))
        .map(|n| grid.coord_of(n))
        .collect()
}

/// Parses a `.`/`#`/`?` block (free / occupied / unknown).
pub fn parse_ascii_map(text: &str) -> Result<OccupancyGrid> {
    let text = text.strip_suffix('\n').unwrap_or(text);
    let text = text.strip_suffix('\r').unwrap_or(text);
    if text.is_empty() {
        return Err(format("empty map"));
    }
    let mut probs = Vec::new();
    let mut cols = None;
    let mut rows = 0;
    for (n, line) in text.split('\n').enumerate() {
        let line = line.strip_suffix('\r').unwrap_or(line);
        let width = line.chars().count();
        match cols {
            None => cols = Some(width),
            Some(w) if w != width => {
                return Err(format(format!(
                    "ragged map: line {} has {width} cells, expected {w}",
                    n + 1
                )))
            }
            _ => {}
        }
        for (k, ch) in line.chars().enumerate() {
            probs.push(match ch {
                '.' => 0.0,
                '#' => 1.0,
                '?' => 0.5,
                other => {
                    return Err(format(format!(
                        "unexpected character {other:?} at line {}, column {}",
                        n + 1,
                        k + 1
                    )))
                }
            });
        }
        rows += 1;
    }
    let cols = cols.unwrap_or(0);
    if cols == 0 {
        return Err(format("map has zero-width rows"));
    }
    OccupancyGrid::new(rows, cols, 1.0, probs)
}

/// Parses a P2 or P5 PGM image into a grid.
///
/// A pixel `v` maps to occupancy `p = 1 - v / maxval`; `p >= occupied_threshold`
/// becomes occupied, `p <= free_threshold` free, anything else unknown.
pub fn parse_pgm_map(
    bytes: &[u8],
    occupied_threshold: f64,
    free_threshold: f64,
) -> Result<OccupancyGrid> {
    if !(0.0 <= free_threshold && free_threshold < occupied_threshold && occupied_threshold <= 1.0)
    {
        return Err(crate::error::parameter(format!(
            "need 0 <= free ({free_threshold}) < occupied ({occupied_threshold}) <= 1"
        )));
    }
    let mut cur = PgmCursor { bytes, pos: 0 };
    let magic = cur.token()?;
    let binary = match magic.as_str() {
        "P2" => false,
        "P5" => true,
        other => return Err(format(format!("unsupported PGM magic {other:?}"))),
    };
    let cols = cur.number()?;
    let rows = cur.number()?;
    let maxval = cur.number()?;
    if cols == 0 || rows == 0 {
        return Err(format("PGM has zero dimension"));
    }
    if maxval == 0 || maxval > 255 {
        return Err(format(format!("PGM maxval {maxval} not in 1..=255")));
    }
    let n = rows * cols;
    let mut pixels = Vec::with_capacity(n);
    if binary {
        // exactly one whitespace byte separates the header from the raster
        if cur.pos >= bytes.len() || !bytes[cur.pos].is_ascii_whitespace() {
            return Err(format("truncated PGM payload"));
        }
        let start = cur.pos + 1;
        let raster = bytes
            .get(start..start + n)
            .ok_or_else(|| format(format!("truncated PGM payload: need {n} bytes")))?;
        pixels.extend(raster.iter().map(|&b| b as usize));
    } else {
        for _ in 0..n {
            pixels.push(cur.number().map_err(|_| format("truncated PGM payload"))?);
        }
    }
    let mut probs = Vec::with_capacity(n);
    for v in pixels {
        if v > maxval {
            return Err(format(format!("pixel value {v} exceeds maxval {maxval}")));
        }
        let p = 1.0 - v as f64 / maxval as f64;
        probs.push(if p >= occupied_threshold {
            1.0
        } else if p <= free_threshold {
            0.0
        } else {
            0.5
        });
    }
    OccupancyGrid::new(rows, cols, 1.0, probs)
}

struct PgmCursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl PgmCursor<'_> {
    fn skip_space(&mut self) {
        while self.pos < self.bytes.len() {
            let b = self.bytes[self.pos];
            if b == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn token(&mut self) -> Result<String> {
        self.skip_space();
        let start = self.pos;
        while self.pos < self.bytes.len() && !self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(format("malformed PGM header"));
        }
        Ok(String::from_utf8_lossy(&self.bytes[start..self.pos]).into_owned())
    }

    fn number(&mut self) -> Result<usize> {
        let t = self.token()?;
        t.parse().map_err(|_| {
            format(format!(
                "malformed PGM header: expected a number, got {t:?}"
            ))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_examples_match_the_worked_figure() {
        assert_eq!(cell_index(CellCoord::new(3, 5), 7).unwrap(), 31);
        assert_eq!(cell_index(CellCoord::new(1, 1), 7).unwrap(), 1);
        assert_eq!(cell_index(CellCoord::new(2, 4), 7).unwrap(), 23);
        assert_eq!(cell_coords(31, 7).unwrap(), CellCoord::new(3, 5));
        assert_eq!(cell_coords(1, 7).unwrap(), CellCoord::new(1, 1));
        assert_eq!(cell_coords(36, 7).unwrap(), CellCoord::new(1, 6));
    }

    #[test]
    fn index_rejects_out_of_range() {
        let g = OccupancyGrid::open(7, 6).unwrap();
        assert!(g.cell_index(CellCoord::new(8, 1)).is_err());
        assert!(g.cell_index(CellCoord::new(0, 1)).is_err());
        assert!(g.cell_coords(0).is_err());
        assert!(g.cell_coords(43).is_err());
        assert_eq!(g.cell_coords(42).unwrap(), CellCoord::new(7, 6));
    }

    #[test]
    fn index_bijection_exhaustive() {
        for rows in 1..=100 {
            for cols in [1, 2, 37, 100] {
                let g = OccupancyGrid::open(rows, cols).unwrap();
                for i in 1..=rows {
                    for j in 1..=cols {
                        let c = CellCoord::new(i, j);
                        let u = g.cell_index(c).unwrap();
                        assert!((1..=rows * cols).contains(&u));
                        assert_eq!(g.cell_coords(u).unwrap(), c);
                        assert_eq!(g.linear_of(g.offset_unchecked(c)), u);
                    }
                }
            }
        }
    }

    #[test]
    fn cell_states_follow_probability_bands() {
        assert_eq!(CellState::from_probability(0.0), CellState::Free);
        assert_eq!(CellState::from_probability(1.0), CellState::Occupied);
        assert_eq!(CellState::from_probability(0.5), CellState::Unknown);
        assert_eq!(
            CellState::from_probability(0.3),
            CellState::Probabilistic(0.3)
        );
        assert!(CellState::Probabilistic(0.3).is_traversable());
        assert!(!CellState::Probabilistic(0.7).is_traversable());
        assert!(!CellState::Unknown.is_traversable());
    }

    #[test]
    fn ascii_examples() {
        let g = parse_ascii_map("..\n.#").unwrap();
        assert_eq!((g.rows(), g.cols()), (2, 2));
        assert_eq!(g.probabilities(), &[0.0, 0.0, 0.0, 1.0]);

        let g = parse_ascii_map("?").unwrap();
        assert_eq!(g.probabilities(), &[0.5]);

        assert!(matches!(
            parse_ascii_map("..\n..."),
            Err(crate::Error::Format(_))
        ));
        assert!(matches!(parse_ascii_map(""), Err(crate::Error::Format(_))));
        assert!(matches!(
            parse_ascii_map(".x"),
            Err(crate::Error::Format(_))
        ));
        assert!(parse_ascii_map("..\n..\n").is_ok());
    }

    #[test]
    fn rejects_invalid_grids() {
        assert!(OccupancyGrid::new(0, 3, 1.0, vec![]).is_err());
        assert!(OccupancyGrid::new(1, 2, 1.0, vec![0.0]).is_err());
        assert!(OccupancyGrid::new(1, 1, 1.0, vec![1.5]).is_err());
        assert!(OccupancyGrid::new(1, 1, 0.0, vec![0.0]).is_err());
    }

    fn pgm_p5(w: usize, h: usize, px: &[u8]) -> Vec<u8> {
        let mut v = format!("P5\n# test map\n{w} {h}\n255\n").into_bytes();
        v.extend_from_slice(px);
        v
    }

    #[test]
    fn pgm_thresholds() {
        let white = parse_pgm_map(&pgm_p5(3, 2, &[255; 6]), 0.65, 0.196).unwrap();
        assert!(white.probabilities().iter().all(|&p| p == 0.0));

        let black = parse_pgm_map(&pgm_p5(3, 2, &[0; 6]), 0.65, 0.196).unwrap();
        assert!(black.probabilities().iter().all(|&p| p == 1.0));

        // 1 - 128/255 = 0.49803..., between the two thresholds
        let grey = parse_pgm_map(&pgm_p5(1, 1, &[128]), 0.65, 0.196).unwrap();
        assert_eq!(grey.probabilities(), &[0.5]);

        let ascii = parse_pgm_map(b"P2\n2 1\n255\n255 0\n", 0.65, 0.196).unwrap();
        assert_eq!(ascii.probabilities(), &[0.0, 1.0]);
    }

    #[test]
    fn pgm_errors() {
        assert!(matches!(
            parse_pgm_map(b"P7\n1 1\n255\n\x00", 0.65, 0.196),
            Err(crate::Error::Format(_))
        ));
        assert!(matches!(
            parse_pgm_map(b"P5\n2 2\n", 0.65, 0.196),
            Err(crate::Error::Format(_))
        ));
        assert!(matches!(
            parse_pgm_map(&pgm_p5(2, 2, &[0, 0, 0]), 0.65, 0.196),
            Err(crate::Error::Format(_))
        ));
        assert!(matches!(
            parse_pgm_map(b"P2\n2 2\n255\n0 0 0\n", 0.65, 0.196),
            Err(crate::Error::Format(_))
        ));
        assert!(parse_pgm_map(&pgm_p5(1, 1, &[0]), 0.2, 0.5).is_err());
    }

    #[test]
    fn neighbor_examples() {
        let m = MotionModel;
        let g = OccupancyGrid::open(3, 3).unwrap();
        assert_eq!(neighbors(&g, CellCoord::new(2, 2), &m).len(), 4);
        assert_eq!(
            neighbors(&g, CellCoord::new(1, 1), &m),
            vec![CellCoord::new(2, 1), CellCoord::new(1, 2)]
        );
        let ringed = parse_ascii_map("###\n#.#\n###").unwrap();
        assert!(neighbors(&ringed, CellCoord::new(2, 2), &m).is_empty());
        let unknown = parse_ascii_map("?.?\n...").unwrap();
        assert_eq!(
            neighbors(&unknown, CellCoord::new(1, 2), &m),
            vec![CellCoord::new(2, 2)]
        );
    }

    #[test]
    fn manhattan_examples() {
        assert_eq!(manhattan(CellCoord::new(1, 1), CellCoord::new(1, 1)), 0);
        assert_eq!(manhattan(CellCoord::new(2, 3), CellCoord::new(2, 4)), 1);
        assert_eq!(manhattan(CellCoord::new(1, 1), CellCoord::new(4, 6)), 8);
    }

    #[test]
    fn default_start_skips_blocked_origin() {
        let g = parse_ascii_map("#.\n..").unwrap();
        assert_eq!(g.default_start(), Some(CellCoord::new(2, 1)));
        let g = parse_ascii_map("##").unwrap();
        assert_eq!(g.default_start(), None);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn ascii_block() -> impl Strategy<Value = String> {
            (1usize..12, 1usize..12).prop_flat_map(|(r, c)| {
                proptest::collection::vec(proptest::sample::select(vec!['.', '#', '?']), r * c)
                    .prop_map(move |cells| {
                        cells
                            .chunks(c)
                            .map(|row| row.iter().collect::<String>())
                            .collect::<Vec<_>>()
                            .join("\n")
                    })
            })
        }

        proptest! {
            #[test]
            fn ascii_roundtrip(text in ascii_block()) {
                let g = parse_ascii_map(&text).unwrap();
                prop_assert_eq!(g.to_ascii(), text);
            }

            #[test]
            fn neighbors_are_free_and_adjacent(text in ascii_block(), pick in any::<prop::sample::Index>()) {
                let g = parse_ascii_map(&text).unwrap();
                let at = g.coord_of(pick.index(g.len()));
                let ns = neighbors(&g, at, &MotionModel);
                prop_assert!(ns.len() <= 4);
                for n in ns {
                    prop_assert!(g.is_free(n));
                    prop_assert_eq!(manhattan(at, n), 1);
                }
            }

            #[test]
            fn state_partition_is_total(p in 0.0f64..=1.0) {
                let s = CellState::from_probability(p);
                let hits = [
                    s == CellState::Free,
                    s == CellState::Occupied,
                    s == CellState::Unknown,
                    matches!(s, CellState::Probabilistic(_)),
                ];
                prop_assert_eq!(hits.iter().filter(|&&h| h).count(), 1);
            }
        }
    }
}
