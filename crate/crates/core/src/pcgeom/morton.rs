//! Morton (z-order) codes over voxel coordinates.
//!
//! Bits are interleaved as `... z1 y1 x1 z0 y0 x0`, so x is the least
//! significant axis. Codes hold up to 21 bits per axis.

use super::{Voxel, VoxelCloud};

pub const MAX_BITS_PER_AXIS: u32 = 21;

#[inline]
fn spread(v: u32) -> u64 {
    let mut x = (v as u64) & 0x1f_ffff;
    x = (x | (x << 32)) & 0x001f_0000_0000_ffff;
    x = (x | (x << 16)) & 0x001f_0000_ff00_00ff;
    x = (x | (x << 8)) & 0x100f_00f0_0f00_f00f;
    x = (x | (x << 4)) & 0x10c3_0c30_c30c_30c3;
    x = (x | (x << 2)) & 0x1249_2492_4924_9249;
    x
}

#[inline]
fn compact(code: u64) -> u32 {
    let mut x = code & 0x1249_2492_4924_9249;
    x = (x | (x >> 2)) & 0x10c3_0c30_c30c_30c3;
    x = (x | (x >> 4)) & 0x100f_00f0_0f00_f00f;
    x = (x | (x >> 8)) & 0x001f_0000_ff00_00ff;
    x = (x | (x >> 16)) & 0x001f_0000_0000_ffff;
    x = (x | (x >> 32)) & 0x1f_ffff;
    x as u32
}

#[inline]
pub fn encode(v: Voxel) -> u64 {
    spread(v[0]) | (spread(v[1]) << 1) | (spread(v[2]) << 2)
}

#[inline]
pub fn decode(code: u64) -> Voxel {
    [compact(code), compact(code >> 1), compact(code >> 2)]
}

/// Morton codes of a cloud plus the permutation that sorts them.
///
/// `permutation[k]` is the index of the input point that lands at sorted
/// position `k`; `codes` are stored in sorted order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MortonOrder {
    pub codes: Vec<u64>,
    pub permutation: Vec<usize>,
}

impl MortonOrder {
    pub fn is_identity(&self) -> bool {
        self.permutation.iter().enumerate().all(|(k, &p)| k == p)
    }

    /// Inverse permutation: position of input point `i` in sorted order.
    pub fn inverse(&self) -> Vec<usize> {
        let mut inv = vec![0usize; self.permutation.len()];
        for (k, &p) in self.permutation.iter().enumerate() {
            inv[p] = k;
        }
        inv
    }
}

pub fn morton_sort(cloud: &VoxelCloud) -> MortonOrder {
    let raw: Vec<u64> = cloud.coords().iter().map(|&v| encode(v)).collect();
    let mut permutation: Vec<usize> = (0..raw.len()).collect();
    permutation.sort_unstable_by_key(|&i| raw[i]);
    let codes = permutation.iter().map(|&i| raw[i]).collect();
    MortonOrder { codes, permutation }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn x_is_least_significant() {
        assert_eq!(encode([0, 0, 0]), 0);
        assert_eq!(encode([1, 0, 0]), 1);
        assert_eq!(encode([0, 1, 0]), 2);
        assert_eq!(encode([0, 0, 1]), 4);
        assert_eq!(encode([3, 0, 0]), 0b001_001);
        assert_eq!(encode([1, 1, 1]), 7);
    }

    #[test]
    fn sort_two_points() {
        let cloud = VoxelCloud::new(vec![[0, 0, 1], [0, 0, 0]], vec![1.0, 2.0], 1, 1).unwrap();
        let order = morton_sort(&cloud);
        assert_eq!(order.codes, vec![0, 4]);
        assert_eq!(order.permutation, vec![1, 0]);
        let sorted = cloud.permuted(&order.permutation);
        assert_eq!(sorted.attrs(), &[2.0, 1.0]);
        assert!(morton_sort(&sorted).is_identity());
    }

    proptest! {
        #[test]
        fn encode_decode_roundtrip(x in 0u32..(1 << 21), y in 0u32..(1 << 21), z in 0u32..(1 << 21)) {
            prop_assert_eq!(decode(encode([x, y, z])), [x, y, z]);
        }

        #[test]
        fn sorting_is_a_bijection(seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut set = std::collections::BTreeSet::new();
            while set.len() < 100 {
                set.insert([rng.random_range(0..64u32), rng.random_range(0..64u32), rng.random_range(0..64u32)]);
            }
            let mut coords: Vec<_> = set.into_iter().collect();
            coords.reverse();
            let cloud = VoxelCloud::new(coords, vec![0.0; 100], 1, 6).unwrap();
            let order = morton_sort(&cloud);
            let mut seen = order.permutation.clone();
            seen.sort_unstable();
            prop_assert_eq!(seen, (0..100).collect::<Vec<_>>());
            prop_assert!(order.codes.windows(2).all(|w| w[0] < w[1]));
            let sorted = cloud.permuted(&order.permutation);
            prop_assert!(morton_sort(&sorted).is_identity());
        }
    }
}
