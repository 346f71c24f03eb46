//! Classical coverage planners used as references: Spiral-STC and ZigZag.
//!
//! Both are deterministic and cover the free cells reachable from the start.
//! Where the ideal pattern breaks (obstacles, partially blocked mega-cells)
//! they stitch the next target in with a BFS shortest path.

use crate::colony::Tour;
use crate::error::{domain, Result};
use crate::gridmap::{CellCoord, Direction, OccupancyGrid};
use crate::search::{reachable_mask, Bfs};

fn checked_start(grid: &OccupancyGrid, start: CellCoord) -> Result<usize> {
    let s = grid.offset(start)?;
    if !grid.is_open(s) {
        return Err(domain(format!("start cell {start} is not free")));
    }
    Ok(s)
}

/// Walks the grid while tracking coverage, so stitching and bookkeeping are
/// shared by both planners.
struct Walker<'a> {
    grid: &'a OccupancyGrid,
    reach: Vec<bool>,
    visited: Vec<bool>,
    remaining: usize,
    path: Vec<usize>,
    bfs: Bfs,
}

impl<'a> Walker<'a> {
    fn new(grid: &'a OccupancyGrid, start: usize) -> Self {
        let reach = reachable_mask(grid, grid.coord_of(start));
        let remaining = reach.iter().filter(|&&r| r).count() - 1;
        let mut visited = vec![false; grid.len()];
        visited[start] = true;
        Self {
            grid,
            reach,
            visited,
            remaining,
            path: vec![start],
            bfs: Bfs::new(grid.len()),
        }
    }

    fn current(&self) -> usize {
        *self.path.last().expect("walker always has a cell")
    }

    fn done(&self) -> bool {
        self.remaining == 0
    }

    fn enter(&mut self, n: usize) {
        if !self.visited[n] {
            self.visited[n] = true;
            self.remaining -= 1;
        }
        self.path.push(n);
    }

    /// Shortest path to `target`, entering every intermediate cell.
    fn go_to(&mut self, target: usize) {
        if target == self.current() {
            return;
        }
        let path = self
            .bfs
            .nearest(self.grid, self.current(), |n| n == target)
            .expect("targets are reachable");
        for n in path {
            self.enter(n);
        }
    }

    /// Shortest path to the nearest unvisited reachable cell. Returns false
    /// when nothing is left.
    fn go_to_nearest_unvisited(&mut self) -> bool {
        let visited = &self.visited;
        match self.bfs.nearest(self.grid, self.current(), |n| !visited[n]) {
            Some(path) => {
                for n in path {
                    self.enter(n);
                }
                true
            }
            None => false,
        }
    }

    fn into_tour(self) -> Tour {
        Tour::from_offsets(self.grid, &self.path)
    }
}

/// Sweep orientation for [`zigzag_with`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum SweepOrientation {
    /// Sweep along rows, advancing one row at each end.
    #[default]
    Horizontal,
    /// Sweep along columns, advancing one column at each end.
    Vertical,
}

/// Boustrophedon sweep along rows.
pub fn zigzag(grid: &OccupancyGrid, start: CellCoord) -> Result<Tour> {
    zigzag_with(grid, start, SweepOrientation::Horizontal)
}

/// Boustrophedon ("mowing the lawn") sweep. The robot runs along its sweep
/// line until blocked or the next cell is already covered, shifts one line
/// forward and reverses, and otherwise detours through a BFS shortest path to
/// the nearest uncovered cell before resuming.
pub fn zigzag_with(
    grid: &OccupancyGrid,
    start: CellCoord,
    orientation: SweepOrientation,
) -> Result<Tour> {
    let s = checked_start(grid, start)?;
    let (forward, back, advance) = match orientation {
        SweepOrientation::Horizontal => (Direction::Right, Direction::Left, Direction::Down),
        SweepOrientation::Vertical => (Direction::Down, Direction::Up, Direction::Right),
    };
    let mut w = Walker::new(grid, s);
    let mut heading = forward;
    let fresh =
        |w: &Walker, d: Direction| grid.open_step(w.current(), d).filter(|&n| !w.visited[n]);
    while !w.done() {
        if let Some(n) = fresh(&w, heading) {
            w.enter(n);
            continue;
        }
        if let Some(n) = fresh(&w, advance) {
            w.enter(n);
            heading = if heading == forward { back } else { forward };
            continue;
        }
        if !w.go_to_nearest_unvisited() {
            break;
        }
        // resume towards whichever side still has uncovered cells
        heading = if fresh(&w, heading).is_some() {
            heading
        } else if fresh(&w, heading.opposite()).is_some() {
            heading.opposite()
        } else {
            heading
        };
    }
    Ok(w.into_tour())
}

/// Spanning-tree coverage over 2x2 mega-cells.
///
/// Mega-cell `(a, b)` holds grid rows `2a-1..=2a` and columns `2b-1..=2b`;
/// cells beyond an odd border count as blocked. A DFS spanning tree is grown
/// (neighbour order Up, Down, Left, Right) over mega-cells holding at least
/// one reachable free cell. Circumnavigating the tree yields a Hamiltonian
/// cycle on the sub-cells of those mega-cells: each mega-cell contributes its
/// own 4-cycle, and each tree edge swaps the two sub-cell edges facing the
/// shared border for the two edges crossing it. The robot follows that cycle
/// from the start, skipping blocked or already covered sub-cells and stitching
/// gaps with BFS shortest paths.
pub fn spiral_stc(grid: &OccupancyGrid, start: CellCoord) -> Result<Tour> {
    let s = checked_start(grid, start)?;
    let mut w = Walker::new(grid, s);
    if w.done() {
        return Ok(w.into_tour());
    }

    let mrows = grid.rows().div_ceil(2);
    let mcols = grid.cols().div_ceil(2);
    let mega_of = |off: usize| {
        let (r, c) = (off / grid.cols(), off % grid.cols());
        (r / 2) * mcols + c / 2
    };
    let mut useful = vec![false; mrows * mcols];
    for (off, &r) in w.reach.iter().enumerate() {
        if r {
            useful[mega_of(off)] = true;
        }
    }

    // DFS spanning tree over useful mega-cells
    let root = mega_of(s);
    let mut in_tree = vec![false; mrows * mcols];
    let mut tree_edges: Vec<(usize, Direction)> = Vec::new();
    let mut stack = vec![(root, 0usize)];
    in_tree[root] = true;
    let mega_step = |m: usize, d: Direction| -> Option<usize> {
        let (r, c) = (m / mcols, m % mcols);
        match d {
            Direction::Up => (r > 0).then(|| m - mcols),
            Direction::Down => (r + 1 < mrows).then(|| m + mcols),
            Direction::Left => (c > 0).then(|| m - 1),
            Direction::Right => (c + 1 < mcols).then(|| m + 1),
        }
    };
    while let Some(&mut (m, ref mut k)) = stack.last_mut() {
        if *k == 4 {
            stack.pop();
            continue;
        }
        let d = Direction::from_index(*k);
        *k += 1;
        if let Some(n) = mega_step(m, d) {
            if useful[n] && !in_tree[n] {
                in_tree[n] = true;
                tree_edges.push((m, d));
                stack.push((n, 0));
            }
        }
    }

    // sub-cells live on a padded 2*mrows x 2*mcols lattice
    let pcols = 2 * mcols;
    let sub =
        |m: usize, dr: usize, dc: usize| (2 * (m / mcols) + dr) * pcols + 2 * (m % mcols) + dc;
    let npad = 4 * mrows * mcols;
    let mut links: Vec<[usize; 2]> = vec![[usize::MAX; 2]; npad];
    let link = |links: &mut Vec<[usize; 2]>, a: usize, b: usize| {
        for (x, y) in [(a, b), (b, a)] {
            let slot = links[x]
                .iter()
                .position(|&v| v == usize::MAX)
                .expect("at most two links");
            links[x][slot] = y;
        }
    };
    let unlink = |links: &mut Vec<[usize; 2]>, a: usize, b: usize| {
        for (x, y) in [(a, b), (b, a)] {
            let slot = links[x].iter().position(|&v| v == y).expect("link exists");
            links[x][slot] = usize::MAX;
        }
    };
    for m in (0..mrows * mcols).filter(|&m| in_tree[m]) {
        let (tl, tr, bl, br) = (sub(m, 0, 0), sub(m, 0, 1), sub(m, 1, 0), sub(m, 1, 1));
        link(&mut links, tl, bl);
        link(&mut links, bl, br);
        link(&mut links, br, tr);
        link(&mut links, tr, tl);
    }
    for &(m, d) in &tree_edges {
        let n = mega_step(m, d).expect("tree edge stays on the mega grid");
        // orient every edge as (upper/left, lower/right)
        let (a, b) = match d {
            Direction::Down | Direction::Right => (m, n),
            Direction::Up | Direction::Left => (n, m),
        };
        if matches!(d, Direction::Up | Direction::Down) {
            unlink(&mut links, sub(a, 1, 0), sub(a, 1, 1));
            unlink(&mut links, sub(b, 0, 0), sub(b, 0, 1));
            link(&mut links, sub(a, 1, 0), sub(b, 0, 0));
            link(&mut links, sub(a, 1, 1), sub(b, 0, 1));
        } else {
            unlink(&mut links, sub(a, 0, 1), sub(a, 1, 1));
            unlink(&mut links, sub(b, 0, 0), sub(b, 1, 0));
            link(&mut links, sub(a, 0, 1), sub(b, 0, 0));
            link(&mut links, sub(a, 1, 1), sub(b, 1, 0));
        }
    }

    let to_grid = |p: usize| -> Option<usize> {
        let (r, c) = (p / pcols, p % pcols);
        (r < grid.rows() && c < grid.cols()).then(|| r * grid.cols() + c)
    };
    let s_pad = (s / grid.cols()) * pcols + s % grid.cols();
    let mut prev = s_pad;
    let mut cur = links[s_pad][0];
    while cur != s_pad && !w.done() {
        if let Some(g) = to_grid(cur) {
            if w.reach[g] && !w.visited[g] {
                w.go_to(g);
            }
        }
        let next = if links[cur][0] == prev {
            links[cur][1]
        } else {
            links[cur][0]
        };
        prev = cur;
        cur = next;
    }
    // the cycle spans every useful mega-cell, so nothing should be left
    while !w.done() && w.go_to_nearest_unvisited() {}
    Ok(w.into_tour())
}
