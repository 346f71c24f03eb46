//! Breadth-first searches over the free cells of a grid.

use crate::gridmap::{CellCoord, Direction, OccupancyGrid};

/// Free cells reachable from `start` (including it), as a row-major mask.
/// Empty mask if `start` is not free.
pub fn reachable_mask(grid: &OccupancyGrid, start: CellCoord) -> Vec<bool> {
    let mut seen = vec![false; grid.len()];
    let Ok(s) = grid.offset(start) else {
        return seen;
    };
    if !grid.is_open(s) {
        return seen;
    }
    let mut queue = vec![s];
    seen[s] = true;
    let mut head = 0;
    while head < queue.len() {
        let cur = queue[head];
        head += 1;
        for d in Direction::ALL {
            if let Some(n) = grid.open_step(cur, d) {
                if !seen[n] {
                    seen[n] = true;
                    queue.push(n);
                }
            }
        }
    }
    seen
}

/// Free cells reachable from `start`, in public linear-index order.
pub fn reachable_cells(grid: &OccupancyGrid, start: CellCoord) -> Vec<CellCoord> {
    let mask = reachable_mask(grid, start);
    grid.free_cells()
        .into_iter()
        .filter(|&c| mask[grid.offset_unchecked(c)])
        .collect()
}

/// Reusable BFS buffers. Uses an epoch stamp so consecutive searches do not
/// clear the whole grid.
#[derive(Debug, Clone)]
pub(crate) struct Bfs {
    stamp: Vec<u32>,
    parent: Vec<usize>,
    epoch: u32,
    frontier: Vec<usize>,
    next: Vec<usize>,
}

impl Bfs {
    pub fn new(cells: usize) -> Self {
        Self {
            stamp: vec![0; cells],
            parent: vec![usize::MAX; cells],
            epoch: 0,
            frontier: Vec::new(),
            next: Vec::new(),
        }
    }

    fn bump(&mut self) {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.epoch = 1;
        }
    }

    /// Shortest path from `from` to the nearest cell with `is_target` true,
    /// moving through open cells only. Among equidistant targets the one with
    /// the smallest linear index wins. The returned path excludes `from` and
    /// ends at the target; `None` if no target is reachable.
    pub fn nearest(
        &mut self,
        grid: &OccupancyGrid,
        from: usize,
        mut is_target: impl FnMut(usize) -> bool,
    ) -> Option<Vec<usize>> {
        self.bump();
        let epoch = self.epoch;
        self.frontier.clear();
        self.frontier.push(from);
        self.stamp[from] = epoch;
        self.parent[from] = usize::MAX;
        while !self.frontier.is_empty() {
            self.next.clear();
            let mut best: Option<(usize, usize)> = None;
            for k in 0..self.frontier.len() {
                let cur = self.frontier[k];
                for d in Direction::ALL {
                    let Some(n) = grid.open_step(cur, d) else {
                        continue;
                    };
                    if self.stamp[n] == epoch {
                        continue;
                    }
                    self.stamp[n] = epoch;
                    self.parent[n] = cur;
                    self.next.push(n);
                    if is_target(n) {
                        let u = grid.linear_of(n);
                        if best.is_none_or(|(bu, _)| u < bu) {
                            best = Some((u, n));
                        }
                    }
                }
            }
            if let Some((_, target)) = best {
                let mut path = vec![target];
                let mut cur = self.parent[target];
                while cur != from {
                    path.push(cur);
                    cur = self.parent[cur];
                }
                path.reverse();
                return Some(path);
            }
            std::mem::swap(&mut self.frontier, &mut self.next);
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridmap::parse_ascii_map;

    #[test]
    fn reachability_respects_walls() {
        let g = parse_ascii_map("..#..\n..#..").unwrap();
        let cells = reachable_cells(&g, CellCoord::new(1, 1));
        assert_eq!(cells.len(), 4);
        assert!(cells.iter().all(|c| c.j <= 2));
    }

    #[test]
    fn nearest_prefers_smallest_linear_index_on_ties() {
        let g = parse_ascii_map("...\n...\n...").unwrap();
        let mut bfs = Bfs::new(g.len());
        let centre = g.offset_unchecked(CellCoord::new(2, 2));
        // both (1,2) [u=4] and (2,1) [u=2] sit at distance 1
        let targets = [CellCoord::new(1, 2), CellCoord::new(2, 1)].map(|c| g.offset_unchecked(c));
        let path = bfs.nearest(&g, centre, |n| targets.contains(&n)).unwrap();
        assert_eq!(path, vec![g.offset_unchecked(CellCoord::new(2, 1))]);
    }

    #[test]
    fn nearest_returns_none_when_unreachable() {
        let g = parse_ascii_map(".#.").unwrap();
        let mut bfs = Bfs::new(g.len());
        assert!(bfs.nearest(&g, 0, |n| n == 2).is_none());
    }
}
