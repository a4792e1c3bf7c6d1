use std::cmp::Ordering;
use std::ops::Range;

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;

use super::{check_len, MultiresTransform, ResolutionHierarchy};
use crate::error::{Error, Result};
use crate::pcgeom::Voxel;

const TIE_TOLERANCE: f64 = 1e-8;

/// Graph Fourier basis of one block.
///
/// Eigenvectors of `Q^-1/2 (D - W) Q^-1/2`, where `W` is the complete
/// inverse-distance graph over the block's points and `Q` their weights,
/// sorted by ascending eigenvalue. Column 0 is exactly `sqrt(q) / |sqrt(q)|`.
/// Every other column has its largest-magnitude entry positive; columns
/// with equal eigenvalues are ordered by their entries rounded to 1e-8.
pub fn block_gft(coords: &[Voxel], weights: &[f64]) -> Result<DMatrix<f64>> {
    let m = coords.len();
    if m == 0 {
        return Err(Error::EmptyPointSet);
    }
    check_len(m, weights.len())?;
    let norm = weights.iter().sum::<f64>().sqrt();
    let dc: Vec<f64> = weights.iter().map(|q| q.sqrt() / norm).collect();
    if m == 1 {
        return Ok(DMatrix::from_element(1, 1, 1.0));
    }

    let mut lap = DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        for j in (i + 1)..m {
            let d2: i64 = (0..3)
                .map(|a| {
                    let d = coords[i][a] as i64 - coords[j][a] as i64;
                    d * d
                })
                .sum();
            if d2 == 0 {
                return Err(Error::RepeatedCoordinate(coords[i]));
            }
            let w = 1.0 / (d2 as f64).sqrt();
            lap[(i, j)] = -w;
            lap[(j, i)] = -w;
            lap[(i, i)] += w;
            lap[(j, j)] += w;
        }
    }
    let inv_sqrt_q: Vec<f64> = weights.iter().map(|q| 1.0 / q.sqrt()).collect();
    for i in 0..m {
        for j in 0..m {
            lap[(i, j)] *= inv_sqrt_q[i] * inv_sqrt_q[j];
        }
    }

    let eig = SymmetricEigen::new(lap);
    let mut cols: Vec<(f64, Vec<f64>)> = (0..m)
        .map(|c| (eig.eigenvalues[c], eig.eigenvectors.column(c).iter().copied().collect()))
        .collect();
    cols.sort_by(|a, b| a.0.total_cmp(&b.0));
    cols[0].1 = dc;
    for (_, v) in cols.iter_mut().skip(1) {
        fix_sign(v);
    }
    order_ties(&mut cols[1..]);

    let mut u = DMatrix::<f64>::zeros(m, m);
    for (c, (_, v)) in cols.iter().enumerate() {
        u.column_mut(c).copy_from_slice(v);
    }
    Ok(u)
}

fn fix_sign(v: &mut [f64]) {
    let max = v.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    let lead = v.iter().position(|x| x.abs() >= max - 1e-12).unwrap_or(0);
    if v[lead] < 0.0 {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

fn rounded_cmp(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        let (rx, ry) = ((x / TIE_TOLERANCE).round(), (y / TIE_TOLERANCE).round());
        match rx.total_cmp(&ry) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

fn order_ties(cols: &mut [(f64, Vec<f64>)]) {
    let scale = cols.iter().fold(1.0f64, |acc, c| acc.max(c.0.abs()));
    let mut start = 0;
    while start < cols.len() {
        let mut end = start + 1;
        while end < cols.len() && cols[end].0 - cols[end - 1].0 <= TIE_TOLERANCE * scale {
            end += 1;
        }
        if end - start > 1 {
            cols[start..end].sort_by(|a, b| rounded_cmp(&a.1, &b.1));
        }
        start = end;
    }
}

/// Basis of one parent block at one level.
#[derive(Clone, Debug)]
pub struct BlockBasis {
    pub children: Range<usize>,
    pub basis: DMatrix<f64>,
    /// First index of this block's coefficients in `d_l`.
    pub detail_offset: usize,
}

/// RAGFT over a fixed hierarchy, with all block bases precomputed.
#[derive(Clone, Debug)]
pub struct Ragft {
    hier: ResolutionHierarchy,
    levels: Vec<Vec<BlockBasis>>,
}

impl Ragft {
    pub fn new(hier: ResolutionHierarchy) -> Result<Self> {
        let mut levels = Vec::with_capacity(hier.depth_levels());
        for l in 0..hier.depth_levels() {
            let (coarse, fine) = (hier.level(l), hier.level(l + 1));
            let bases: Vec<DMatrix<f64>> = coarse
                .children
                .par_iter()
                .map(|r| block_gft(&fine.points[r.clone()], &fine.weights[r.clone()]))
                .collect::<Result<_>>()?;
            let mut offset = 0;
            let blocks = coarse
                .children
                .iter()
                .zip(bases)
                .map(|(r, basis)| {
                    let b = BlockBasis {
                        children: r.clone(),
                        basis,
                        detail_offset: offset,
                    };
                    offset += r.len() - 1;
                    b
                })
                .collect();
            levels.push(blocks);
        }
        Ok(Self { hier, levels })
    }

    pub fn blocks(&self, l: usize) -> &[BlockBasis] {
        &self.levels[l]
    }
}

impl MultiresTransform for Ragft {
    fn hierarchy(&self) -> &ResolutionHierarchy {
        &self.hier
    }

    fn forward_level(&self, l: usize, fine: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        check_len(self.hier.level(l + 1).len(), fine.len())?;
        let mut approx = vec![0.0; self.hier.level(l).len()];
        let mut detail = vec![0.0; self.hier.detail_len(l)];
        for (i, block) in self.levels[l].iter().enumerate() {
            let x = &fine[block.children.clone()];
            for (c, col) in block.basis.column_iter().enumerate() {
                let s: f64 = col.iter().zip(x).map(|(u, v)| u * v).sum();
                if c == 0 {
                    approx[i] = s;
                } else {
                    detail[block.detail_offset + c - 1] = s;
                }
            }
        }
        Ok((approx, detail))
    }

    fn inverse_level(&self, l: usize, approx: &[f64], detail: &[f64]) -> Result<Vec<f64>> {
        check_len(self.hier.level(l).len(), approx.len())?;
        check_len(self.hier.detail_len(l), detail.len())?;
        let mut fine = vec![0.0; self.hier.level(l + 1).len()];
        for (i, block) in self.levels[l].iter().enumerate() {
            let out = &mut fine[block.children.clone()];
            for (c, col) in block.basis.column_iter().enumerate() {
                let coef = if c == 0 {
                    approx[i]
                } else {
                    detail[block.detail_offset + c - 1]
                };
                for (o, u) in out.iter_mut().zip(col.iter()) {
                    *o += u * coef;
                }
            }
        }
        Ok(fine)
    }
}
