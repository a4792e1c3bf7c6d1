//! Exact k-nearest-neighbor search over integer voxel coordinates.
//!
//! Points are bucketed into a uniform grid of power-of-two cells. A query
//! visits Chebyshev shells of cells around its own cell and stops once the
//! k-th best squared distance cannot be beaten by any unvisited cell.
//! Squared distances are exact integers, so ordering ties are resolved
//! exactly by `(distance², morton code, index)`.

use std::collections::HashMap;

use crate::pcgeom::morton;
use crate::pcgeom::Voxel;

/// Ordering key of a candidate neighbor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Candidate {
    pub dist2: u64,
    pub code: u64,
    pub index: u32,
}

pub struct GridIndex<'a> {
    points: &'a [Voxel],
    codes: Vec<u64>,
    shift: u32,
    /// Point indices grouped by cell.
    order: Vec<u32>,
    cells: HashMap<[u32; 3], (u32, u32)>,
    max_cell: [u32; 3],
}

#[inline]
fn dist2(a: Voxel, b: Voxel) -> u64 {
    let dx = a[0] as i64 - b[0] as i64;
    let dy = a[1] as i64 - b[1] as i64;
    let dz = a[2] as i64 - b[2] as i64;
    (dx * dx + dy * dy + dz * dz) as u64
}

impl<'a> GridIndex<'a> {
    /// `occupancy` is the target mean number of points per occupied cell.
    pub fn new(points: &'a [Voxel], occupancy: usize) -> Self {
        let codes: Vec<u64> = points.iter().map(|&v| morton::encode(v)).collect();
        let mut sorted = codes.clone();
        sorted.sort_unstable();

        let max_coord = points.iter().flat_map(|v| v.iter().copied()).max().unwrap_or(0);
        let max_shift = 32 - max_coord.leading_zeros();
        let mut shift = 0;
        while shift < max_shift {
            let mut cells = 0usize;
            let mut last = None;
            for &c in &sorted {
                let cell = c >> (3 * shift);
                if last != Some(cell) {
                    cells += 1;
                    last = Some(cell);
                }
            }
            if points.len() >= occupancy * cells {
                break;
            }
            shift += 1;
        }

        let cell_of = |v: Voxel| [v[0] >> shift, v[1] >> shift, v[2] >> shift];
        let mut order: Vec<u32> = (0..points.len() as u32).collect();
        order.sort_unstable_by_key(|&i| (morton::encode(cell_of(points[i as usize])), i));
        let mut cells = HashMap::new();
        let mut max_cell = [0u32; 3];
        let mut start = 0usize;
        while start < order.len() {
            let cell = cell_of(points[order[start] as usize]);
            let mut end = start + 1;
            while end < order.len() && cell_of(points[order[end] as usize]) == cell {
                end += 1;
            }
            for a in 0..3 {
                max_cell[a] = max_cell[a].max(cell[a]);
            }
            cells.insert(cell, (start as u32, end as u32));
            start = end;
        }
        Self {
            points,
            codes,
            shift,
            order,
            cells,
            max_cell,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// The `k` nearest indexed points to `query`, ascending by
    /// `(distance², morton code, index)`, never returning `exclude`.
    pub fn nearest(&self, query: Voxel, k: usize, exclude: Option<u32>) -> Vec<Candidate> {
        let avail = self.points.len() - usize::from(exclude.is_some());
        let k = k.min(avail);
        let mut best: Vec<Candidate> = Vec::with_capacity(k + 1);
        if k == 0 {
            return best;
        }
        let qc = [
            (query[0] >> self.shift) as i64,
            (query[1] >> self.shift) as i64,
            (query[2] >> self.shift) as i64,
        ];
        // Shell radius past which every cell lies outside the grid.
        let reach = (0..3)
            .map(|a| qc[a].max(self.max_cell[a] as i64 - qc[a]))
            .max()
            .unwrap_or(0);
        let side = 1i64 << self.shift;

        let consider = |i: u32, best: &mut Vec<Candidate>| {
            if Some(i) == exclude {
                return;
            }
            let cand = Candidate {
                dist2: dist2(query, self.points[i as usize]),
                code: self.codes[i as usize],
                index: i,
            };
            if best.len() == k {
                if cand >= best[k - 1] {
                    return;
                }
                best.pop();
            }
            let pos = best.partition_point(|b| *b < cand);
            best.insert(pos, cand);
        };
        let visit = |cell: [i64; 3], best: &mut Vec<Candidate>| {
            if cell.iter().any(|&c| c < 0) || (0..3).any(|a| cell[a] > self.max_cell[a] as i64) {
                return;
            }
            let key = [cell[0] as u32, cell[1] as u32, cell[2] as u32];
            if let Some(&(s, e)) = self.cells.get(&key) {
                for &i in &self.order[s as usize..e as usize] {
                    consider(i, best);
                }
            }
        };

        for r in 0..=reach {
            // Once a shell spans more cells than there are points, scan them all.
            if r > 0 && ((2 * r + 1).pow(3) as usize) > 8 * self.points.len() + 64 {
                best.clear();
                for i in 0..self.points.len() as u32 {
                    consider(i, &mut best);
                }
                break;
            }
            if r == 0 {
                visit(qc, &mut best);
            } else {
                for dx in -r..=r {
                    for dy in -r..=r {
                        if dx.abs() == r || dy.abs() == r {
                            for dz in -r..=r {
                                visit([qc[0] + dx, qc[1] + dy, qc[2] + dz], &mut best);
                            }
                        } else {
                            visit([qc[0] + dx, qc[1] + dy, qc[2] - r], &mut best);
                            visit([qc[0] + dx, qc[1] + dy, qc[2] + r], &mut best);
                        }
                    }
                }
            }
            // Unvisited points are at distance >= r * side + 1.
            if best.len() == k {
                let bound = (r * side) as u64;
                if best[k - 1].dist2 <= bound * bound {
                    break;
                }
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn brute(points: &[Voxel], q: Voxel, k: usize, exclude: Option<u32>) -> Vec<Candidate> {
        let mut all: Vec<Candidate> = points
            .iter()
            .enumerate()
            .filter(|(i, _)| Some(*i as u32) != exclude)
            .map(|(i, &p)| Candidate {
                dist2: dist2(q, p),
                code: morton::encode(p),
                index: i as u32,
            })
            .collect();
        all.sort_unstable();
        all.truncate(k);
        all
    }

    #[test]
    fn matches_brute_force() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for &(n, extent) in &[(1usize, 4u32), (5, 4), (300, 16), (2000, 128), (500, 1024)] {
            let mut set = std::collections::BTreeSet::new();
            while set.len() < n {
                set.insert([
                    rng.random_range(0..extent),
                    rng.random_range(0..extent),
                    rng.random_range(0..extent),
                ]);
            }
            let points: Vec<Voxel> = set.into_iter().collect();
            for occupancy in [1, 8] {
                let grid = GridIndex::new(&points, occupancy);
                for _ in 0..50 {
                    let k = rng.random_range(1..10);
                    let qi = rng.random_range(0..n);
                    assert_eq!(
                        grid.nearest(points[qi], k, Some(qi as u32)),
                        brute(&points, points[qi], k, Some(qi as u32))
                    );
                    let q = [
                        rng.random_range(0..extent * 2),
                        rng.random_range(0..extent),
                        rng.random_range(0..extent),
                    ];
                    assert_eq!(grid.nearest(q, k, None), brute(&points, q, k, None));
                }
            }
        }
    }
}
