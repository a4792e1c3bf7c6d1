//! Affine RGB <-> YUV conversions.

use nalgebra::{Matrix3, Vector3};

use super::VoxelCloud;
use crate::error::{Error, Result};

/// Identifier stored in the bitstream header.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ColorSpace {
    /// Attributes are coded as given.
    Identity = 0,
    /// BT.709, full range.
    Bt709 = 1,
    /// BT.601, full range.
    Bt601 = 2,
}

impl ColorSpace {
    pub fn from_id(id: u8) -> Option<Self> {
        match id {
            0 => Some(Self::Identity),
            1 => Some(Self::Bt709),
            2 => Some(Self::Bt601),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Identity => "identity",
            Self::Bt709 => "bt709",
            Self::Bt601 => "bt601",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "identity" | "rgb" => Some(Self::Identity),
            "bt709" | "709" => Some(Self::Bt709),
            "bt601" | "601" => Some(Self::Bt601),
            _ => None,
        }
    }
}

/// `yuv = matrix * rgb + offset`, with `peak` the PSNR reference level.
#[derive(Clone, Debug, PartialEq)]
pub struct ColorConvention {
    pub space: ColorSpace,
    pub matrix: Matrix3<f64>,
    pub offset: Vector3<f64>,
    pub peak: f64,
    inverse: Matrix3<f64>,
}

impl ColorConvention {
    pub fn new(space: ColorSpace, matrix: Matrix3<f64>, offset: Vector3<f64>, peak: f64) -> Result<Self> {
        let inverse = matrix
            .try_inverse()
            .ok_or_else(|| Error::Config("color matrix is singular".into()))?;
        if peak.is_nan() || peak <= 0.0 {
            return Err(Error::Config("color peak must be positive".into()));
        }
        Ok(Self {
            space,
            matrix,
            offset,
            peak,
            inverse,
        })
    }

    fn from_luma_weights(space: ColorSpace, kr: f64, kb: f64) -> Self {
        let kg = 1.0 - kr - kb;
        let cb = 2.0 * (1.0 - kb);
        let cr = 2.0 * (1.0 - kr);
        #[rustfmt::skip]
        let matrix = Matrix3::new(
            kr, kg, kb,
            -kr / cb, -kg / cb, (1.0 - kb) / cb,
            (1.0 - kr) / cr, -kg / cr, -kb / cr,
        );
        Self::new(space, matrix, Vector3::new(0.0, 128.0, 128.0), 255.0).expect("invertible")
    }

    pub fn bt709() -> Self {
        Self::from_luma_weights(ColorSpace::Bt709, 0.2126, 0.0722)
    }

    pub fn bt601() -> Self {
        Self::from_luma_weights(ColorSpace::Bt601, 0.299, 0.114)
    }

    pub fn identity() -> Self {
        Self::new(ColorSpace::Identity, Matrix3::identity(), Vector3::zeros(), 255.0).expect("invertible")
    }

    pub fn for_space(space: ColorSpace) -> Self {
        match space {
            ColorSpace::Identity => Self::identity(),
            ColorSpace::Bt709 => Self::bt709(),
            ColorSpace::Bt601 => Self::bt601(),
        }
    }

    pub fn forward_pixel(&self, rgb: [f64; 3]) -> [f64; 3] {
        let out = self.matrix * Vector3::from(rgb) + self.offset;
        [out[0], out[1], out[2]]
    }

    pub fn inverse_pixel(&self, yuv: [f64; 3]) -> [f64; 3] {
        let out = self.inverse * (Vector3::from(yuv) - self.offset);
        [out[0], out[1], out[2]]
    }

    fn map(&self, cloud: &VoxelCloud, f: impl Fn([f64; 3]) -> [f64; 3]) -> Result<VoxelCloud> {
        if self.space == ColorSpace::Identity {
            return Ok(cloud.clone());
        }
        if cloud.channels() != 3 {
            return Err(Error::ChannelCount {
                expected: 3,
                got: cloud.channels(),
            });
        }
        let attrs = cloud
            .attrs()
            .chunks_exact(3)
            .flat_map(|p| f([p[0], p[1], p[2]]))
            .collect();
        cloud.with_attrs(attrs, 3)
    }

    pub fn rgb_to_yuv(&self, cloud: &VoxelCloud) -> Result<VoxelCloud> {
        self.map(cloud, |p| self.forward_pixel(p))
    }

    pub fn yuv_to_rgb(&self, cloud: &VoxelCloud) -> Result<VoxelCloud> {
        self.map(cloud, |p| self.inverse_pixel(p))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn gray_maps_to_mid_chroma() {
        let yuv = ColorConvention::bt709().forward_pixel([128.0, 128.0, 128.0]);
        for c in yuv {
            assert!((c - 128.0).abs() < 1e-12, "{yuv:?}");
        }
    }

    #[test]
    fn red_luma() {
        let yuv = ColorConvention::bt709().forward_pixel([255.0, 0.0, 0.0]);
        assert!((yuv[0] - 0.2126 * 255.0).abs() < 1e-12);
        assert!((yuv[0] - 54.213).abs() < 1e-9);
        // V saturates at the top of the chroma range for pure red.
        assert!((yuv[2] - 255.5).abs() < 1e-9);
    }

    #[test]
    fn rejects_wrong_channel_count() {
        let cloud = VoxelCloud::new(vec![[0, 0, 0]], vec![1.0], 1, 0).unwrap();
        let err = ColorConvention::bt709().rgb_to_yuv(&cloud).unwrap_err();
        assert!(matches!(err, Error::ChannelCount { expected: 3, got: 1 }));
    }

    #[test]
    fn singular_matrix_rejected() {
        assert!(ColorConvention::new(ColorSpace::Identity, Matrix3::zeros(), Vector3::zeros(), 255.0).is_err());
    }

    proptest! {
        #[test]
        fn roundtrip(r in 0.0..=255.0f64, g in 0.0..=255.0f64, b in 0.0..=255.0f64) {
            for conv in [ColorConvention::bt709(), ColorConvention::bt601()] {
                let back = conv.inverse_pixel(conv.forward_pixel([r, g, b]));
                prop_assert!((back[0] - r).abs() < 1e-9);
                prop_assert!((back[1] - g).abs() < 1e-9);
                prop_assert!((back[2] - b).abs() < 1e-9);
            }
        }
    }
}
