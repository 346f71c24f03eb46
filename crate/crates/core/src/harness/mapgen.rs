use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{parameter, Error, Result};
use crate::gridmap::{Direction, OccupancyGrid};

const MAX_ATTEMPTS: usize = 16;

/// Random obstacle map with a 4-connected free set.
///
/// Each cell is an obstacle with probability `density`. Components of the
/// free set are then merged: the component holding the smallest linear index
/// is joined to its nearest other component by carving a shortest corridor
/// through the obstacles, until one component remains.
pub fn generate_random_map(
    rows: usize,
    cols: usize,
    density: f64,
    seed: u64,
) -> Result<OccupancyGrid> {
    if rows == 0 || cols == 0 {
        return Err(parameter(format!(
            "map dimensions must be positive, got {rows}x{cols}"
        )));
    }
    if !(0.0..1.0).contains(&density) {
        return Err(parameter(format!(
            "obstacle density must lie in [0, 1), got {density}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_ATTEMPTS {
        let mut open: Vec<bool> = (0..rows * cols)
            .map(|_| !rng.random_bool(density))
            .collect();
        if !open.iter().any(|&o| o) {
            continue;
        }
        connect(rows, cols, &mut open);
        let probs = open.iter().map(|&o| if o { 0.0 } else { 1.0 }).collect();
        return OccupancyGrid::new(rows, cols, 1.0, probs);
    }
    Err(Error::Generation(format!(
        "no free cell after {MAX_ATTEMPTS} draws at density {density}"
    )))
}

fn step(rows: usize, cols: usize, off: usize, d: Direction) -> Option<usize> {
    let (r, c) = (off / cols, off % cols);
    match d {
        Direction::Up => (r > 0).then(|| off - cols),
        Direction::Down => (r + 1 < rows).then(|| off + cols),
        Direction::Left => (c > 0).then(|| off - 1),
        Direction::Right => (c + 1 < cols).then(|| off + 1),
    }
}

/// Labels free components; returns labels (`usize::MAX` for obstacles) and count.
fn components(rows: usize, cols: usize, open: &[bool]) -> (Vec<usize>, usize) {
    let mut label = vec![usize::MAX; open.len()];
    let mut count = 0;
    // scan in column-major order so label 0 holds the smallest linear index
    for c in 0..cols {
        for r in 0..rows {
            let s = r * cols + c;
            if !open[s] || label[s] != usize::MAX {
                continue;
            }
            label[s] = count;
            let mut stack = vec![s];
            while let Some(cur) = stack.pop() {
                for d in Direction::ALL {
                    if let Some(n) = step(rows, cols, cur, d) {
                        if open[n] && label[n] == usize::MAX {
                            label[n] = count;
                            stack.push(n);
                        }
                    }
                }
            }
            count += 1;
        }
    }
    (label, count)
}

fn connect(rows: usize, cols: usize, open: &mut [bool]) {
    loop {
        let (label, count) = components(rows, cols, open);
        if count <= 1 {
            return;
        }
        // multi-source BFS from component 0 over every cell
        let mut parent = vec![usize::MAX; open.len()];
        let mut seen = vec![false; open.len()];
        let mut queue: Vec<usize> = (0..open.len()).filter(|&k| label[k] == 0).collect();
        for &q in &queue {
            seen[q] = true;
        }
        let mut head = 0;
        let mut hit = None;
        'bfs: while head < queue.len() {
            let cur = queue[head];
            head += 1;
            for d in Direction::ALL {
                let Some(n) = step(rows, cols, cur, d) else {
                    continue;
                };
                if seen[n] {
                    continue;
                }
                seen[n] = true;
                parent[n] = cur;
                if open[n] {
                    hit = Some(n);
                    break 'bfs;
                }
                queue.push(n);
            }
        }
        let mut cur = parent[hit.expect("another component exists")];
        while label[cur] != 0 {
            open[cur] = true;
            cur = parent[cur];
        }
    }
}
