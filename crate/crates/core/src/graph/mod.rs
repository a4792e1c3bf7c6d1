//! Inverse-distance k-nearest-neighbor graphs and one-hop smoothing.

pub mod knn;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::pcgeom::Voxel;
use knn::GridIndex;

/// Directed weighted graph in compressed row form.
///
/// Row `i` lists the out-edges of point `i` in ascending neighbor order;
/// `degrees[i]` is the row sum of its weights.
#[derive(Clone, Debug, PartialEq)]
pub struct PointGraph {
    offsets: Vec<usize>,
    targets: Vec<u32>,
    weights: Vec<f64>,
    degrees: Vec<f64>,
}

impl PointGraph {
    fn from_rows(rows: Vec<Vec<(u32, f64)>>) -> Self {
        let mut offsets = Vec::with_capacity(rows.len() + 1);
        offsets.push(0);
        let total = rows.iter().map(Vec::len).sum();
        let mut targets = Vec::with_capacity(total);
        let mut weights = Vec::with_capacity(total);
        let mut degrees = Vec::with_capacity(rows.len());
        for row in rows {
            let mut deg = 0.0;
            for (t, w) in row {
                targets.push(t);
                weights.push(w);
                deg += w;
            }
            degrees.push(deg);
            offsets.push(targets.len());
        }
        Self {
            offsets,
            targets,
            weights,
            degrees,
        }
    }

    /// Number of rows (source points).
    pub fn n(&self) -> usize {
        self.degrees.len()
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len()
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    /// Out-edges of row `i` as `(target, weight)`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.offsets[i]..self.offsets[i + 1];
        self.targets[r.clone()]
            .iter()
            .zip(&self.weights[r])
            .map(|(&t, &w)| (t as usize, w))
    }

    /// Largest target index plus one, or 0 for an edgeless graph.
    fn target_bound(&self) -> usize {
        self.targets.iter().map(|&t| t as usize + 1).max().unwrap_or(0)
    }
}

fn occupancy_for(k: usize) -> usize {
    k.clamp(4, 16)
}

/// Each point is joined to its `min(k, N-1)` nearest other points with
/// weight `1 / distance`. Distance ties go to the smaller Morton code, then
/// the smaller index.
pub fn build_knn_graph(points: &[Voxel], k: usize) -> Result<PointGraph> {
    if points.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    if k == 0 {
        return Err(Error::Config("k must be positive".into()));
    }
    let grid = GridIndex::new(points, occupancy_for(k));
    let rows = (0..points.len())
        .into_par_iter()
        .map(|i| {
            grid.nearest(points[i], k, Some(i as u32))
                .into_iter()
                .map(|c| (c.index, 1.0 / (c.dist2 as f64).sqrt()))
                .collect()
        })
        .collect();
    Ok(PointGraph::from_rows(rows))
}

/// Bipartite graph from each query point to its `min(k, N)` nearest
/// reference points. A query that coincides with a reference point gets
/// that single reference with weight 1.
pub fn build_cross_knn(query: &[Voxel], reference: &[Voxel], k: usize) -> Result<PointGraph> {
    if reference.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    if k == 0 {
        return Err(Error::Config("k must be positive".into()));
    }
    let grid = GridIndex::new(reference, occupancy_for(k));
    let rows = query
        .par_iter()
        .map(|&q| {
            let found = grid.nearest(q, k, None);
            if found[0].dist2 == 0 {
                return vec![(found[0].index, 1.0)];
            }
            found
                .into_iter()
                .map(|c| (c.index, 1.0 / (c.dist2 as f64).sqrt()))
                .collect()
        })
        .collect();
    Ok(PointGraph::from_rows(rows))
}

/// Applies `D^-1 W` to a row-major `signal` with `channels` values per
/// point. Rows without edges pass through unchanged.
pub fn smooth(graph: &PointGraph, signal: &[f64], channels: usize) -> Result<Vec<f64>> {
    if channels == 0 || !signal.len().is_multiple_of(channels) {
        return Err(Error::LengthMismatch {
            expected: graph.n() * channels.max(1),
            got: signal.len(),
        });
    }
    let points = signal.len() / channels;
    if graph.target_bound() > points {
        return Err(Error::LengthMismatch {
            expected: graph.target_bound(),
            got: points,
        });
    }
    // Square graphs filter in place; bipartite ones map reference values onto query rows.
    let square = graph.n() == points;
    let mut out = vec![0.0; graph.n() * channels];
    for i in 0..graph.n() {
        let dst = &mut out[i * channels..(i + 1) * channels];
        let deg = graph.degrees[i];
        if deg == 0.0 {
            if !square {
                return Err(Error::LengthMismatch {
                    expected: graph.n(),
                    got: points,
                });
            }
            dst.copy_from_slice(&signal[i * channels..(i + 1) * channels]);
            continue;
        }
        for (j, w) in graph.row(i) {
            for c in 0..channels {
                dst[c] += w * signal[j * channels + c];
            }
        }
        for x in dst.iter_mut() {
            *x /= deg;
        }
    }
    Ok(out)
}
