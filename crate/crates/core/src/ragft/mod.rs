//! Region-adaptive graph Fourier transform and the multi-resolution
//! transform interface shared with the Haar baseline.
//!
//! A level transform maps the signal at level `l + 1` to one approximation
//! coefficient per occupied parent block plus `m - 1` detail coefficients
//! for a block with `m` children. Iterating from the finest level down
//! yields the coefficient vector `[a_0 | d_0 | d_1 | ... | d_{L-1}]`.
//!
//! All signals are indexed in the hierarchy's Morton order.

mod gft;
pub mod hierarchy;

pub use gft::{block_gft, BlockBasis, Ragft};
pub use hierarchy::{BlockSizes, Level, ResolutionHierarchy};

use crate::error::{Error, Result};

/// Coefficients `[a_0 | d_0 | ... | d_{L-1}]` of one channel.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientLayout {
    pub values: Vec<f64>,
    /// Start of each segment: `offsets[0] = 0` for `a_0`, `offsets[l + 1]` for `d_l`.
    pub offsets: Vec<usize>,
}

impl CoefficientLayout {
    /// Segment boundaries implied by a hierarchy.
    pub fn offsets_for(hier: &ResolutionHierarchy) -> Vec<usize> {
        let mut offsets = vec![0, hier.level(0).len()];
        for l in 0..hier.depth_levels().saturating_sub(1) {
            let last = *offsets.last().expect("nonempty");
            offsets.push(last + hier.detail_len(l));
        }
        offsets.truncate(hier.depth_levels() + 1);
        offsets
    }

    pub fn from_values(hier: &ResolutionHierarchy, values: Vec<f64>) -> Result<Self> {
        if values.len() != hier.len() {
            return Err(Error::LengthMismatch {
                expected: hier.len(),
                got: values.len(),
            });
        }
        Ok(Self {
            values,
            offsets: Self::offsets_for(hier),
        })
    }

    fn segment_range(&self, s: usize) -> std::ops::Range<usize> {
        let end = self.offsets.get(s + 1).copied().unwrap_or(self.values.len());
        self.offsets[s]..end
    }

    pub fn approx(&self) -> &[f64] {
        &self.values[self.segment_range(0)]
    }

    pub fn detail(&self, l: usize) -> &[f64] {
        &self.values[self.segment_range(l + 1)]
    }

    pub fn energy(&self) -> f64 {
        self.values.iter().map(|x| x * x).sum()
    }
}

/// An orthonormal multi-resolution transform over a fixed hierarchy.
pub trait MultiresTransform: Send + Sync {
    fn hierarchy(&self) -> &ResolutionHierarchy;

    /// Analysis from level `l + 1` to `(a_l, d_l)`.
    fn forward_level(&self, l: usize, fine: &[f64]) -> Result<(Vec<f64>, Vec<f64>)>;

    /// Synthesis of level `l + 1` from `(a_l, d_l)`.
    fn inverse_level(&self, l: usize, approx: &[f64], detail: &[f64]) -> Result<Vec<f64>>;

    fn forward_full(&self, attrs: &[f64]) -> Result<CoefficientLayout> {
        let hier = self.hierarchy();
        check_len(hier.len(), attrs.len())?;
        let levels = hier.depth_levels();
        let mut approx = attrs.to_vec();
        let mut details = vec![Vec::new(); levels];
        for l in (0..levels).rev() {
            let (a, d) = self.forward_level(l, &approx)?;
            approx = a;
            details[l] = d;
        }
        let mut values = approx;
        for d in details {
            values.extend(d);
        }
        Ok(CoefficientLayout {
            values,
            offsets: CoefficientLayout::offsets_for(hier),
        })
    }

    fn inverse_full(&self, layout: &CoefficientLayout) -> Result<Vec<f64>> {
        let hier = self.hierarchy();
        check_len(hier.len(), layout.values.len())?;
        let mut approx = layout.approx().to_vec();
        for l in 0..hier.depth_levels() {
            approx = self.inverse_level(l, &approx, layout.detail(l))?;
        }
        Ok(approx)
    }
}

pub(crate) fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::LengthMismatch { expected, got });
    }
    Ok(())
}
