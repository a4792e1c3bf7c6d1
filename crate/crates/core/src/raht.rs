//! Region-adaptive Haar transform over dyadic blocks.
//!
//! Inside each 2x2x2 block, occupied points are merged pairwise along x,
//! then y, then z by weighted two-point rotations. Each merge emits one
//! detail coefficient; the last survivor is the block's approximation.
//! Shares [`ResolutionHierarchy`] and [`CoefficientLayout`] with the RAGFT
//! so predictors and entropy coding are transform-agnostic.
//!
//! [`CoefficientLayout`]: crate::ragft::CoefficientLayout

use std::collections::BTreeMap;
use std::ops::Range;

use crate::error::{Error, Result};
use crate::pcgeom::morton;
use crate::ragft::{check_len, MultiresTransform, ResolutionHierarchy};

/// One weighted butterfly: the low output replaces slot `lo`, the high
/// output is emitted as a detail.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HaarStep {
    pub lo: u8,
    pub hi: u8,
    pub weights: (f64, f64),
    cos: f64,
    sin: f64,
}

impl HaarStep {
    pub fn new(lo: u8, hi: u8, w_lo: f64, w_hi: f64) -> Self {
        let s = (w_lo + w_hi).sqrt();
        Self {
            lo,
            hi,
            weights: (w_lo, w_hi),
            cos: w_lo.sqrt() / s,
            sin: w_hi.sqrt() / s,
        }
    }

    #[inline]
    pub fn forward(&self, x0: f64, x1: f64) -> (f64, f64) {
        (self.cos * x0 + self.sin * x1, -self.sin * x0 + self.cos * x1)
    }

    #[inline]
    pub fn inverse(&self, lo: f64, hi: f64) -> (f64, f64) {
        (self.cos * lo - self.sin * hi, self.sin * lo + self.cos * hi)
    }
}

#[derive(Clone, Debug)]
struct BlockPlan {
    children: Range<usize>,
    steps: Vec<HaarStep>,
    dc_slot: u8,
    detail_offset: usize,
}

#[derive(Clone, Copy)]
struct Node {
    key: [u32; 3],
    slot: u8,
    weight: f64,
}

fn plan_block(local: &[[u32; 3]], weights: &[f64]) -> (Vec<HaarStep>, u8) {
    let mut nodes: Vec<Node> = local
        .iter()
        .zip(weights)
        .enumerate()
        .map(|(i, (&key, &weight))| Node {
            key,
            slot: i as u8,
            weight,
        })
        .collect();
    let mut steps = Vec::with_capacity(local.len().saturating_sub(1));
    for axis in 0..3 {
        let mut groups: BTreeMap<u64, Vec<Node>> = BTreeMap::new();
        for n in nodes {
            let mut k = n.key;
            k[axis] = 0;
            groups.entry(morton::encode(k)).or_default().push(n);
        }
        nodes = Vec::with_capacity(groups.len());
        for (_, mut g) in groups {
            g.sort_by_key(|n| n.key[axis]);
            let mut merged = g[0];
            merged.key[axis] = 0;
            if let [lo, hi] = g[..] {
                steps.push(HaarStep::new(lo.slot, hi.slot, lo.weight, hi.weight));
                merged.weight = lo.weight + hi.weight;
            }
            nodes.push(merged);
        }
    }
    debug_assert_eq!(nodes.len(), 1);
    (steps, nodes[0].slot)
}

/// RAHT over a hierarchy with block size 2 at every level.
#[derive(Clone, Debug)]
pub struct Raht {
    hier: ResolutionHierarchy,
    levels: Vec<Vec<BlockPlan>>,
}

impl Raht {
    pub fn new(hier: ResolutionHierarchy) -> Result<Self> {
        if let Some(&b) = hier.block_sizes().as_slice().iter().find(|&&b| b != 2) {
            return Err(Error::NonBinaryBlockSize(b));
        }
        let mut levels = Vec::with_capacity(hier.depth_levels());
        for l in 0..hier.depth_levels() {
            let (coarse, fine) = (hier.level(l), hier.level(l + 1));
            let mut offset = 0;
            let plans = coarse
                .children
                .iter()
                .map(|r| {
                    let local: Vec<[u32; 3]> = fine.points[r.clone()].iter().map(|p| p.map(|c| c & 1)).collect();
                    let (steps, dc_slot) = plan_block(&local, &fine.weights[r.clone()]);
                    let plan = BlockPlan {
                        children: r.clone(),
                        steps,
                        dc_slot,
                        detail_offset: offset,
                    };
                    offset += r.len() - 1;
                    plan
                })
                .collect();
            levels.push(plans);
        }
        Ok(Self { hier, levels })
    }

    /// Butterfly schedule of block `i` at level `l`.
    pub fn steps(&self, l: usize, i: usize) -> &[HaarStep] {
        &self.levels[l][i].steps
    }
}

impl MultiresTransform for Raht {
    fn hierarchy(&self) -> &ResolutionHierarchy {
        &self.hier
    }

    fn forward_level(&self, l: usize, fine: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        check_len(self.hier.level(l + 1).len(), fine.len())?;
        let mut approx = vec![0.0; self.hier.level(l).len()];
        let mut detail = vec![0.0; self.hier.detail_len(l)];
        let mut work = [0.0f64; 8];
        for (i, plan) in self.levels[l].iter().enumerate() {
            let x = &fine[plan.children.clone()];
            work[..x.len()].copy_from_slice(x);
            for (s, step) in plan.steps.iter().enumerate() {
                let (lo, hi) = step.forward(work[step.lo as usize], work[step.hi as usize]);
                work[step.lo as usize] = lo;
                detail[plan.detail_offset + s] = hi;
            }
            approx[i] = work[plan.dc_slot as usize];
        }
        Ok((approx, detail))
    }

    fn inverse_level(&self, l: usize, approx: &[f64], detail: &[f64]) -> Result<Vec<f64>> {
        check_len(self.hier.level(l).len(), approx.len())?;
        check_len(self.hier.detail_len(l), detail.len())?;
        let mut fine = vec![0.0; self.hier.level(l + 1).len()];
        let mut work = [0.0f64; 8];
        for (i, plan) in self.levels[l].iter().enumerate() {
            work[plan.dc_slot as usize] = approx[i];
            for (s, step) in plan.steps.iter().enumerate().rev() {
                let (x0, x1) = step.inverse(work[step.lo as usize], detail[plan.detail_offset + s]);
                work[step.lo as usize] = x0;
                work[step.hi as usize] = x1;
            }
            fine[plan.children.clone()].copy_from_slice(&work[..plan.children.len()]);
        }
        Ok(fine)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ragft::{BlockSizes, Ragft};
    use rand::{Rng, SeedableRng};

    fn raht_for(coords: &[[u32; 3]], depth: u32) -> Raht {
        Raht::new(ResolutionHierarchy::build(coords, depth, &BlockSizes::dyadic(depth)).unwrap()).unwrap()
    }

    #[test]
    fn constant_pair() {
        let t = raht_for(&[[0, 0, 0], [1, 0, 0]], 1);
        let (a, d) = t.forward_level(0, &[1.0, 1.0]).unwrap();
        assert!((a[0] - 2f64.sqrt()).abs() < 1e-15);
        assert!(d[0].abs() < 1e-15);
    }

    #[test]
    fn singleton_passthrough() {
        let t = raht_for(&[[1, 1, 0]], 1);
        let (a, d) = t.forward_level(0, &[7.5]).unwrap();
        assert_eq!(a, vec![7.5]);
        assert!(d.is_empty());
        assert_eq!(t.inverse_level(0, &a, &d).unwrap(), vec![7.5]);
    }

    #[test]
    fn rejects_large_blocks() {
        let hier = ResolutionHierarchy::build(&[[0, 0, 0]], 2, &BlockSizes::new(vec![4], 2).unwrap()).unwrap();
        assert!(matches!(Raht::new(hier), Err(Error::NonBinaryBlockSize(4))));
    }

    #[test]
    fn full_block_energy_and_roundtrip() {
        let coords: Vec<[u32; 3]> = (0..8).map(|i| [i & 1, (i >> 1) & 1, (i >> 2) & 1]).collect();
        let t = raht_for(&coords, 1);
        assert_eq!(t.steps(0, 0).len(), 7);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let x: Vec<f64> = (0..8).map(|_| rng.random_range(-100.0..100.0)).collect();
        let (a, d) = t.forward_level(0, &x).unwrap();
        let e_in: f64 = x.iter().map(|v| v * v).sum();
        let e_out: f64 = a.iter().chain(&d).map(|v| v * v).sum();
        assert!((e_in - e_out).abs() < 1e-10 * e_in);
        let back = t.inverse_level(0, &a, &d).unwrap();
        for (p, q) in x.iter().zip(&back) {
            assert!((p - q).abs() < 1e-10);
        }
    }

    #[test]
    fn dc_matches_weighted_mean() {
        // Unequal weights: the block DC must be sum(sqrt(q) x) / sqrt(sum q).
        let coords = [[0, 0, 0], [1, 0, 0], [2, 0, 0], [0, 2, 0], [3, 3, 3]];
        let t = raht_for(&coords, 2);
        let (a1, d1) = t.forward_level(1, &[1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        let (a0, _) = t.forward_level(0, &a1).unwrap();
        let q1 = &t.hierarchy().level(1).weights;
        assert_eq!(q1, &vec![2.0, 1.0, 1.0, 1.0]);
        let expect = (1.0 + 2.0 + 3.0 + 4.0 + 5.0) / 5f64.sqrt();
        assert!((a0[0] - expect).abs() < 1e-12);
        assert_eq!(d1.len(), 1);
    }

    #[test]
    fn two_point_blocks_agree_with_ragft() {
        let coords = [[0, 0, 0], [0, 1, 0], [2, 2, 2], [2, 2, 3], [5, 4, 4], [4, 4, 4]];
        let hier = ResolutionHierarchy::build(&coords, 3, &BlockSizes::dyadic(3)).unwrap();
        let raht = Raht::new(hier.clone()).unwrap();
        let ragft = Ragft::new(hier).unwrap();
        let x = [3.0, -1.0, 4.0, 1.5, -9.0, 2.6];
        let (ra, rd) = raht.forward_level(2, &x).unwrap();
        let (ga, gd) = ragft.forward_level(2, &x).unwrap();
        for (p, q) in ra.iter().zip(&ga) {
            assert!((p - q).abs() < 1e-12);
        }
        for (p, q) in rd.iter().zip(&gd) {
            assert!((p.abs() - q.abs()).abs() < 1e-12);
        }
    }
}
