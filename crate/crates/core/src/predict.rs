//! Cross-resolution predictors of detail coefficients.
//!
//! Every predictor builds a fine-level signal from the decoded
//! approximations `a_l`, forward-transforms it one level and keeps the
//! detail part as the prediction of `d_l`.
//!
//! * [`PredictorKind::Proposed`] interpolates by zero-padding the details,
//!   then smooths the weight-normalized result with a k-NN graph built on
//!   the fine level itself.
//! * [`PredictorKind::LowRes`] averages the normalized values of the k
//!   nearest coarse points (block centers) around each fine point.
//! * [`PredictorKind::None`] predicts zero.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{build_cross_knn, build_knn_graph, smooth, PointGraph};
use crate::pcgeom::Voxel;
use crate::ragft::{check_len, MultiresTransform, ResolutionHierarchy};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PredictorKind {
    None = 0,
    Proposed = 1,
    LowRes = 2,
}

impl PredictorKind {
    pub fn from_id(id: u8) -> Option<Self> {
        match id {
            0 => Some(Self::None),
            1 => Some(Self::Proposed),
            2 => Some(Self::LowRes),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::None => "none",
            Self::Proposed => "proposed",
            Self::LowRes => "lowres",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "none" => Some(Self::None),
            "proposed" => Some(Self::Proposed),
            "lowres" | "low-res" => Some(Self::LowRes),
            _ => None,
        }
    }

    pub fn default_k(self) -> u16 {
        match self {
            Self::None => 0,
            Self::Proposed => 7,
            Self::LowRes => 5,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PredictorConfig {
    pub kind: PredictorKind,
    pub k: u16,
}

impl PredictorConfig {
    pub fn new(kind: PredictorKind, k: u16) -> Result<Self> {
        if kind != PredictorKind::None && k == 0 {
            return Err(Error::Config("predictor neighbor count must be positive".into()));
        }
        let k = if kind == PredictorKind::None { 0 } else { k };
        Ok(Self { kind, k })
    }

    pub fn none() -> Self {
        Self {
            kind: PredictorKind::None,
            k: 0,
        }
    }

    pub fn proposed() -> Self {
        Self {
            kind: PredictorKind::Proposed,
            k: 7,
        }
    }

    pub fn lowres() -> Self {
        Self {
            kind: PredictorKind::LowRes,
            k: 5,
        }
    }
}

/// Fine-level signal synthesized from `approx` with all details zeroed.
pub fn interpolate_zero_pad(t: &dyn MultiresTransform, l: usize, approx: &[f64]) -> Result<Vec<f64>> {
    let zeros = vec![0.0; t.hierarchy().detail_len(l)];
    t.inverse_level(l, approx, &zeros)
}

/// Closed form of [`interpolate_zero_pad`]: `b_j = sqrt(q_j / q_parent) a_parent`.
pub fn interpolate_closed_form(hier: &ResolutionHierarchy, l: usize, approx: &[f64]) -> Result<Vec<f64>> {
    let (coarse, fine) = (hier.level(l), hier.level(l + 1));
    check_len(coarse.len(), approx.len())?;
    Ok((0..fine.len())
        .map(|j| {
            let i = fine.parent[j];
            (fine.weights[j] / coarse.weights[i]).sqrt() * approx[i]
        })
        .collect())
}

/// k-NN graph over the fine points of level `l`.
pub fn proposed_graph(hier: &ResolutionHierarchy, l: usize, k: usize) -> Result<PointGraph> {
    build_knn_graph(&hier.level(l + 1).points, k)
}

/// Graph from fine points at level `l + 1` to the coarse block centers of
/// level `l`. Both sides are expressed in doubled fine units so block
/// centers stay integral.
pub fn lowres_graph(hier: &ResolutionHierarchy, l: usize, k: usize) -> Result<PointGraph> {
    let b = hier.block_size(l);
    let query: Vec<Voxel> = hier.level(l + 1).points.iter().map(|p| p.map(|c| 2 * c)).collect();
    let reference: Vec<Voxel> = hier
        .level(l)
        .points
        .iter()
        .map(|p| p.map(|c| 2 * b * c + (b - 1)))
        .collect();
    build_cross_knn(&query, &reference, k)
}

fn details_of(t: &dyn MultiresTransform, l: usize, fine: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let (approx, detail) = t.forward_level(l, fine)?;
    Ok((detail, approx))
}

/// Zero-pad interpolation, `Q^1/2 D^-1 W Q^-1/2` smoothing over the fine
/// graph, then one forward level. Returns `(predicted details, predicted
/// approximations)`; callers use only the details.
pub fn predict_proposed(
    t: &dyn MultiresTransform,
    l: usize,
    approx: &[f64],
    graph: &PointGraph,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let q = &t.hierarchy().level(l + 1).weights;
    check_len(q.len(), graph.n())?;
    let b = interpolate_zero_pad(t, l, approx)?;
    let normalized: Vec<f64> = b.iter().zip(q).map(|(x, w)| x / w.sqrt()).collect();
    let smoothed = smooth(graph, &normalized, 1)?;
    let filtered: Vec<f64> = smoothed.iter().zip(q).map(|(x, w)| x * w.sqrt()).collect();
    details_of(t, l, &filtered)
}

/// Inverse-distance average of the normalized coarse values `a_i / sqrt(q_i)`
/// over `graph` (see [`lowres_graph`]), rescaled by `sqrt(q_j)`, then one
/// forward level. Returns the predicted details.
pub fn predict_lowres(t: &dyn MultiresTransform, l: usize, approx: &[f64], graph: &PointGraph) -> Result<Vec<f64>> {
    let hier = t.hierarchy();
    let (coarse, fine) = (hier.level(l), hier.level(l + 1));
    check_len(coarse.len(), approx.len())?;
    check_len(fine.len(), graph.n())?;
    let normalized: Vec<f64> = approx.iter().zip(&coarse.weights).map(|(a, w)| a / w.sqrt()).collect();
    let averaged = smooth(graph, &normalized, 1)?;
    let fine_signal: Vec<f64> = averaged.iter().zip(&fine.weights).map(|(p, w)| p * w.sqrt()).collect();
    Ok(details_of(t, l, &fine_signal)?.0)
}

pub fn predict_none(t: &dyn MultiresTransform, l: usize) -> Vec<f64> {
    vec![0.0; t.hierarchy().detail_len(l)]
}

/// A predictor with its per-level graphs prebuilt for one hierarchy.
pub struct Predictor {
    config: PredictorConfig,
    graphs: Vec<PointGraph>,
}

impl Predictor {
    pub fn new(config: PredictorConfig, hier: &ResolutionHierarchy) -> Result<Self> {
        let k = config.k as usize;
        let levels = hier.depth_levels();
        let graphs = match config.kind {
            PredictorKind::None => Vec::new(),
            PredictorKind::Proposed => (0..levels)
                .into_par_iter()
                .map(|l| proposed_graph(hier, l, k))
                .collect::<Result<_>>()?,
            PredictorKind::LowRes => (0..levels)
                .into_par_iter()
                .map(|l| lowres_graph(hier, l, k))
                .collect::<Result<_>>()?,
        };
        Ok(Self { config, graphs })
    }

    pub fn config(&self) -> PredictorConfig {
        self.config
    }

    /// Predicted `d_l` from decoded `a_l`.
    pub fn predict(&self, t: &dyn MultiresTransform, l: usize, approx: &[f64]) -> Result<Vec<f64>> {
        match self.config.kind {
            PredictorKind::None => {
                check_len(t.hierarchy().level(l).len(), approx.len())?;
                Ok(predict_none(t, l))
            }
            PredictorKind::Proposed => Ok(predict_proposed(t, l, approx, &self.graphs[l])?.0),
            PredictorKind::LowRes => predict_lowres(t, l, approx, &self.graphs[l]),
        }
    }
}
