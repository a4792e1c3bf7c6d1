//! Deterministic synthetic test clouds.

use std::f64::consts::TAU;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::pcgeom::{Voxel, VoxelCloud};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Surface {
    Sphere,
    Cube,
    Plane,
}

impl Surface {
    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sphere" => Some(Self::Sphere),
            "cube" => Some(Self::Cube),
            "plane" => Some(Self::Plane),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Sphere => "sphere",
            Self::Cube => "cube",
            Self::Plane => "plane",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Field {
    Constant,
    TrilinearRamp,
    SmoothSinusoid,
    Random,
}

impl Field {
    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "constant" => Some(Self::Constant),
            "trilinear-ramp" | "ramp" => Some(Self::TrilinearRamp),
            "smooth-sinusoid" | "sinusoid" => Some(Self::SmoothSinusoid),
            "random" => Some(Self::Random),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Constant => "constant",
            Self::TrilinearRamp => "trilinear-ramp",
            Self::SmoothSinusoid => "smooth-sinusoid",
            Self::Random => "random",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SynthParams {
    pub surface: Surface,
    pub points: usize,
    pub depth: u32,
    pub field: Field,
    pub seed: u64,
}

impl SynthParams {
    pub fn new(surface: Surface, points: usize, depth: u32, field: Field) -> Self {
        Self {
            surface,
            points,
            depth,
            field,
            seed: 1,
        }
    }
}

/// All surface voxels of the shape inscribed in `[0, side)^3`.
fn surface_voxels(surface: Surface, side: u32) -> Vec<Voxel> {
    let mut out = Vec::new();
    let c = (side as f64 - 1.0) / 2.0;
    match surface {
        Surface::Sphere => {
            for z in 0..side {
                for y in 0..side {
                    for x in 0..side {
                        let d = ((x as f64 - c).powi(2) + (y as f64 - c).powi(2) + (z as f64 - c).powi(2)).sqrt();
                        if (d - c).abs() <= 0.5 {
                            out.push([x, y, z]);
                        }
                    }
                }
            }
        }
        Surface::Cube => {
            let edge = |v: u32| v == 0 || v + 1 == side;
            for z in 0..side {
                for y in 0..side {
                    for x in 0..side {
                        if edge(x) || edge(y) || edge(z) {
                            out.push([x, y, z]);
                        }
                    }
                }
            }
        }
        Surface::Plane => {
            for y in 0..side {
                for x in 0..side {
                    out.push([x, y, (x + y) / 2]);
                }
            }
        }
    }
    out
}

fn field_value(field: Field, u: [f64; 3], rng: &mut ChaCha8Rng) -> [f64; 3] {
    let [x, y, z] = u;
    match field {
        Field::Constant => [180.0, 120.0, 60.0],
        Field::TrilinearRamp => [
            40.0 + 170.0 * x,
            40.0 + 170.0 * (0.5 * y + 0.5 * z),
            230.0 - 190.0 * (x + y + z) / 3.0,
        ],
        Field::SmoothSinusoid => [
            128.0 + 90.0 * (TAU * x).sin() * (TAU * 0.5 * y).cos(),
            128.0 + 90.0 * (TAU * (y + 0.5 * z)).sin(),
            128.0 + 90.0 * (TAU * (z - 0.5 * x)).cos(),
        ],
        Field::Random => [
            rng.random_range(0.0..=255.0),
            rng.random_range(0.0..=255.0),
            rng.random_range(0.0..=255.0),
        ],
    }
}

/// Voxelized surface of the smallest size holding at least `points`
/// voxels, subsampled to exactly `points` with the seed, colored by the
/// field evaluated at voxel centers normalized to the surface extent.
pub fn synth_cloud(params: &SynthParams) -> Result<VoxelCloud> {
    let SynthParams {
        surface,
        points,
        depth,
        field,
        seed,
    } = *params;
    if points == 0 {
        return Err(Error::EmptyPointSet);
    }
    if depth > 20 {
        return Err(Error::Config(format!(
            "depth {depth} exceeds the supported maximum of 20"
        )));
    }
    let max_side = 1u32 << depth;
    // Surface counts grow with side², so bisect the side length.
    let count = |side: u32| surface_voxels(surface, side).len();
    if count(max_side) < points {
        return Err(Error::Config(format!(
            "a {} at depth {depth} holds fewer than {points} voxels",
            surface.name()
        )));
    }
    let (mut lo, mut hi) = (1u32, max_side);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if count(mid) >= points {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let side = lo;
    let all = surface_voxels(surface, side);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut picked = index::sample(&mut rng, all.len(), points).into_vec();
    picked.sort_unstable();
    let coords: Vec<Voxel> = picked.into_iter().map(|i| all[i]).collect();
    let attrs = coords
        .iter()
        .flat_map(|v| {
            let u = v.map(|c| (c as f64 + 0.5) / side as f64);
            field_value(field, u, &mut rng)
        })
        .collect();
    VoxelCloud::new(coords, attrs, 3, depth)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_count_and_determinism() {
        for surface in [Surface::Sphere, Surface::Cube, Surface::Plane] {
            let p = SynthParams::new(surface, 1000, 7, Field::Random);
            let a = synth_cloud(&p).unwrap();
            assert_eq!(a.len(), 1000);
            assert_eq!(a.depth(), 7);
            assert_eq!(a, synth_cloud(&p).unwrap());
            let b = synth_cloud(&SynthParams { seed: 2, ..p }).unwrap();
            assert_ne!(a, b);
        }
    }

    #[test]
    fn sphere_4096_is_a_valid_cloud() {
        let c = synth_cloud(&SynthParams::new(Surface::Sphere, 4096, 6, Field::SmoothSinusoid)).unwrap();
        assert_eq!(c.len(), 4096);
        let side = 1u32 << 6;
        assert!(c.coords().iter().all(|v| v.iter().all(|&x| x < side)));
        let mut seen = std::collections::HashSet::new();
        assert!(c.coords().iter().all(|v| seen.insert(*v)));
        assert!(c.attrs().iter().all(|&a| (0.0..=255.0).contains(&a)));
    }

    #[test]
    fn too_many_points() {
        assert!(synth_cloud(&SynthParams::new(Surface::Plane, 100, 3, Field::Constant)).is_err());
    }

    #[test]
    fn fields() {
        let c = synth_cloud(&SynthParams::new(Surface::Cube, 200, 5, Field::Constant)).unwrap();
        assert!(c.attrs().chunks(3).all(|p| p == [180.0, 120.0, 60.0]));
        assert_eq!(Field::parse("smooth_sinusoid"), Some(Field::SmoothSinusoid));
        assert_eq!(Surface::parse("SPHERE"), Some(Surface::Sphere));
    }
}
