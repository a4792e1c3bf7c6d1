//! Voxelized point clouds: data model, Morton ordering, PLY I/O and color
//! conversion.

pub mod color;
pub mod morton;
pub mod ply;

pub use color::{ColorConvention, ColorSpace};
pub use morton::{morton_sort, MortonOrder};
pub use ply::{load_ply, read_ply, save_ply, write_ply, PlyFormat};

use crate::error::{Error, Result};

/// Integer voxel coordinate `[x, y, z]`.
pub type Voxel = [u32; 3];

/// Geometry plus per-point attributes at a single resolution.
///
/// Attributes are stored row-major, `channels` values per point.
#[derive(Clone, Debug, PartialEq)]
pub struct VoxelCloud {
    coords: Vec<Voxel>,
    attrs: Vec<f64>,
    channels: usize,
    depth: u32,
}

/// Smallest depth whose grid `[0, 2^depth)^3` contains every coordinate.
pub fn min_depth(coords: &[Voxel]) -> u32 {
    let max = coords.iter().flat_map(|v| v.iter().copied()).max().unwrap_or(0);
    32 - max.leading_zeros()
}

impl VoxelCloud {
    pub fn new(coords: Vec<Voxel>, attrs: Vec<f64>, channels: usize, depth: u32) -> Result<Self> {
        if depth > morton::MAX_BITS_PER_AXIS - 1 {
            return Err(Error::Config(format!(
                "depth {depth} exceeds the supported maximum of 20"
            )));
        }
        if attrs.len() != coords.len() * channels {
            return Err(Error::LengthMismatch {
                expected: coords.len() * channels,
                got: attrs.len(),
            });
        }
        for (index, v) in coords.iter().enumerate() {
            if v.iter().any(|&c| (c as u64) >> depth != 0) {
                return Err(Error::CoordinateOutOfRange {
                    index,
                    coord: v.map(i64::from),
                    depth,
                });
            }
        }
        let mut keyed: Vec<(u64, usize)> = coords
            .iter()
            .enumerate()
            .map(|(i, &v)| (morton::encode(v), i))
            .collect();
        keyed.sort_unstable();
        if let Some(w) = keyed.windows(2).find(|w| w[0].0 == w[1].0) {
            let index = w[0].1.max(w[1].1);
            return Err(Error::DuplicateVoxel {
                index,
                coord: coords[index],
            });
        }
        Ok(Self {
            coords,
            attrs,
            channels,
            depth,
        })
    }

    /// Builds a cloud whose depth is the smallest that fits its coordinates.
    pub fn with_min_depth(coords: Vec<Voxel>, attrs: Vec<f64>, channels: usize) -> Result<Self> {
        let depth = min_depth(&coords);
        Self::new(coords, attrs, channels, depth)
    }

    /// Geometry-only cloud (zero attribute channels).
    pub fn geometry(coords: Vec<Voxel>, depth: u32) -> Result<Self> {
        Self::new(coords, Vec::new(), 0, depth)
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coords(&self) -> &[Voxel] {
        &self.coords
    }

    pub fn attrs(&self) -> &[f64] {
        &self.attrs
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn attr(&self, i: usize) -> &[f64] {
        &self.attrs[i * self.channels..(i + 1) * self.channels]
    }

    /// Copies channel `c` out as a contiguous signal.
    pub fn channel(&self, c: usize) -> Vec<f64> {
        self.attrs.iter().skip(c).step_by(self.channels).copied().collect()
    }

    /// Same geometry with a different attribute table.
    pub fn with_attrs(&self, attrs: Vec<f64>, channels: usize) -> Result<Self> {
        if attrs.len() != self.len() * channels {
            return Err(Error::LengthMismatch {
                expected: self.len() * channels,
                got: attrs.len(),
            });
        }
        Ok(Self {
            coords: self.coords.clone(),
            attrs,
            channels,
            depth: self.depth,
        })
    }

    /// Same geometry with attributes assembled from per-channel signals.
    pub fn with_channels(&self, signals: &[Vec<f64>]) -> Result<Self> {
        let channels = signals.len();
        let mut attrs = vec![0.0; self.len() * channels];
        for (c, s) in signals.iter().enumerate() {
            if s.len() != self.len() {
                return Err(Error::LengthMismatch {
                    expected: self.len(),
                    got: s.len(),
                });
            }
            for (i, &x) in s.iter().enumerate() {
                attrs[i * channels + c] = x;
            }
        }
        self.with_attrs(attrs, channels)
    }

    /// Reorders points so that output point `k` is input point `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let coords = perm.iter().map(|&i| self.coords[i]).collect();
        let mut attrs = Vec::with_capacity(self.attrs.len());
        for &i in perm {
            attrs.extend_from_slice(self.attr(i));
        }
        Self {
            coords,
            attrs,
            channels: self.channels,
            depth: self.depth,
        }
    }

    /// Re-labels the grid depth, checking that every coordinate still fits.
    pub fn with_depth(self, depth: u32) -> Result<Self> {
        Self::new(self.coords, self.attrs, self.channels, depth)
    }
}
