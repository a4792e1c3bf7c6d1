use std::ops::Range;

use crate::error::{Error, Result};
use crate::pcgeom::morton::{self, MortonOrder};
use crate::pcgeom::{Voxel, VoxelCloud};

/// Per-level block edge lengths, listed from the finest level to the
/// coarsest. Every entry is a power of two greater than one and the
/// product equals `2^depth`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockSizes(Vec<u32>);

impl BlockSizes {
    pub fn new(sizes: Vec<u32>, depth: u32) -> Result<Self> {
        let mut bits = 0;
        for &b in &sizes {
            if b < 2 || !b.is_power_of_two() {
                return Err(Error::InvalidBlockSize(b));
            }
            bits += b.trailing_zeros();
        }
        if bits != depth {
            return Err(Error::BlockSizeProduct { sizes, depth });
        }
        Ok(Self(sizes))
    }

    /// Uses `head` at the finest levels, then fills with 2 until the
    /// product reaches `2^depth`. `[2]` gives dyadic blocks everywhere,
    /// `[16]` gives one 16-block level followed by dyadic levels.
    pub fn expand(head: &[u32], depth: u32) -> Result<Self> {
        let mut sizes = Vec::new();
        let mut bits = 0;
        for &b in head {
            if b < 2 || !b.is_power_of_two() {
                return Err(Error::InvalidBlockSize(b));
            }
            if bits + b.trailing_zeros() > depth {
                break;
            }
            bits += b.trailing_zeros();
            sizes.push(b);
        }
        while bits < depth {
            sizes.push(2);
            bits += 1;
        }
        Self::new(sizes, depth)
    }

    pub fn dyadic(depth: u32) -> Self {
        Self(vec![2; depth as usize])
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn levels(&self) -> usize {
        self.0.len()
    }
}

/// Points and importance weights at one resolution.
#[derive(Clone, Debug)]
pub struct Level {
    /// Coordinates in this level's voxel units, Morton-sorted.
    pub points: Vec<Voxel>,
    /// Importance weight of each point: the number of full-resolution points it covers.
    pub weights: Vec<f64>,
    /// For each point, its children at the next finer level (contiguous).
    /// Empty at the finest level.
    pub children: Vec<Range<usize>>,
    /// For each point, its parent at the next coarser level. Empty at level 0.
    pub parent: Vec<usize>,
}

impl Level {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// The octree pyramid `levels[0]` (coarsest) ... `levels[L]` (input cloud).
#[derive(Clone, Debug)]
pub struct ResolutionHierarchy {
    levels: Vec<Level>,
    block_sizes: BlockSizes,
    depth: u32,
    order: MortonOrder,
}

impl ResolutionHierarchy {
    /// Builds the pyramid over `coords` (any order; they are Morton-sorted
    /// internally and the permutation is kept).
    pub fn build(coords: &[Voxel], depth: u32, block_sizes: &BlockSizes) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::EmptyPointSet);
        }
        let bits: u32 = block_sizes.0.iter().map(|b| b.trailing_zeros()).sum();
        if bits != depth {
            return Err(Error::BlockSizeProduct {
                sizes: block_sizes.0.clone(),
                depth,
            });
        }
        let geometry = VoxelCloud::geometry(coords.to_vec(), depth)?;
        let order = morton::morton_sort(&geometry);

        let n_levels = block_sizes.levels();
        let mut levels = Vec::with_capacity(n_levels + 1);
        let mut codes = order.codes.clone();
        levels.push(Level {
            points: codes.iter().map(|&c| morton::decode(c)).collect(),
            weights: vec![1.0; codes.len()],
            children: Vec::new(),
            parent: Vec::new(),
        });
        for &b in &block_sizes.0 {
            let shift = 3 * b.trailing_zeros();
            let fine = levels.last_mut().expect("nonempty");
            let mut parent_codes = Vec::new();
            let mut children = Vec::new();
            let mut weights = Vec::new();
            let mut parent = Vec::with_capacity(codes.len());
            let mut start = 0;
            while start < codes.len() {
                let pc = codes[start] >> shift;
                let mut end = start + 1;
                while end < codes.len() && codes[end] >> shift == pc {
                    end += 1;
                }
                parent.extend(std::iter::repeat_n(parent_codes.len(), end - start));
                weights.push(fine.weights[start..end].iter().sum());
                children.push(start..end);
                parent_codes.push(pc);
                start = end;
            }
            fine.parent = parent;
            levels.push(Level {
                points: parent_codes.iter().map(|&c| morton::decode(c)).collect(),
                weights,
                children,
                parent: Vec::new(),
            });
            codes = parent_codes;
        }
        levels.reverse();
        Ok(Self {
            levels,
            block_sizes: block_sizes.clone(),
            depth,
            order,
        })
    }

    pub fn from_cloud(cloud: &VoxelCloud, block_sizes: &BlockSizes) -> Result<Self> {
        Self::build(cloud.coords(), cloud.depth(), block_sizes)
    }

    /// Number of transform levels `L`.
    pub fn depth_levels(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn level(&self, l: usize) -> &Level {
        &self.levels[l]
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn block_sizes(&self) -> &BlockSizes {
        &self.block_sizes
    }

    /// Edge length of the blocks merging level `l + 1` into level `l`.
    pub fn block_size(&self, l: usize) -> u32 {
        self.block_sizes.0[self.depth_levels() - 1 - l]
    }

    pub fn len(&self) -> usize {
        self.levels.last().map_or(0, Level::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Permutation from input order to the Morton order of the finest level.
    pub fn order(&self) -> &MortonOrder {
        &self.order
    }

    /// Reorders a per-point signal from input order to finest-level order.
    pub fn to_morton(&self, signal: &[f64]) -> Vec<f64> {
        self.order.permutation.iter().map(|&i| signal[i]).collect()
    }

    /// Inverse of [`Self::to_morton`].
    pub fn from_morton(&self, signal: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; signal.len()];
        for (k, &i) in self.order.permutation.iter().enumerate() {
            out[i] = signal[k];
        }
        out
    }

    /// Detail coefficient count produced at level `l`.
    pub fn detail_len(&self, l: usize) -> usize {
        self.levels[l + 1].len() - self.levels[l].len()
    }
}
