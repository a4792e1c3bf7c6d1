//! Rate and distortion measurement, synthetic clouds and sweeps.

mod config;
mod sweep;
mod synth;

pub use config::{parse_codec_config, parse_sweep, preset, CloudSource, SweepSpec, PRESETS};
pub use sweep::{psnr_at_rate, rd_sweep, read_csv, write_csv, RdPoint};
pub use synth::{synth_cloud, Field, Surface, SynthParams};

use crate::entropy::Bitstream;
use crate::error::{Error, Result};
use crate::pcgeom::{ColorConvention, VoxelCloud};

fn check_same_shape(a: &VoxelCloud, b: &VoxelCloud) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    if a.channels() != b.channels() {
        return Err(Error::ChannelCount {
            expected: a.channels(),
            got: b.channels(),
        });
    }
    if a.coords() != b.coords() {
        return Err(Error::Config("clouds have different geometry or ordering".into()));
    }
    Ok(())
}

/// `10 log10(peak² / mse)`; `+inf` when the signals are identical.
pub fn psnr(mse: f64, peak: f64) -> f64 {
    if mse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (peak * peak / mse).log10()
    }
}

/// Per-channel MSE after converting both clouds with `conv`.
pub fn channel_mse(original: &VoxelCloud, decoded: &VoxelCloud, conv: &ColorConvention) -> Result<Vec<f64>> {
    check_same_shape(original, decoded)?;
    let a = conv.rgb_to_yuv(original)?;
    let b = conv.rgb_to_yuv(decoded)?;
    let c = a.channels();
    let mut sums = vec![0.0; c];
    for (i, (x, y)) in a.attrs().iter().zip(b.attrs()).enumerate() {
        sums[i % c] += (x - y) * (x - y);
    }
    let n = a.len().max(1) as f64;
    Ok(sums.into_iter().map(|s| s / n).collect())
}

/// PSNR of each converted channel (Y, U, V for a YUV convention).
pub fn psnr_channels(original: &VoxelCloud, decoded: &VoxelCloud, conv: &ColorConvention) -> Result<Vec<f64>> {
    Ok(channel_mse(original, decoded, conv)?
        .into_iter()
        .map(|m| psnr(m, conv.peak))
        .collect())
}

pub fn psnr_y(original: &VoxelCloud, decoded: &VoxelCloud, conv: &ColorConvention) -> Result<f64> {
    Ok(psnr_channels(original, decoded, conv)?[0])
}

/// Total bits over `n`, header included.
pub fn bits_per_point(bitstream: &Bitstream, n: usize) -> f64 {
    8.0 * bitstream.byte_len() as f64 / n as f64
}

pub fn payload_bits_per_point(bitstream: &Bitstream, n: usize) -> f64 {
    8.0 * bitstream.payload_bytes() as f64 / n as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::TransformKind;
    use crate::entropy::Header;
    use crate::pcgeom::ColorSpace;
    use crate::predict::PredictorConfig;

    fn cloud(attrs: Vec<f64>) -> VoxelCloud {
        let n = attrs.len() / 3;
        let coords = (0..n as u32).map(|i| [i, 0, 0]).collect();
        VoxelCloud::new(coords, attrs, 3, 8).unwrap()
    }

    #[test]
    fn psnr_identical_and_offset() {
        let a = cloud(vec![10.0, 20.0, 30.0, 200.0, 100.0, 50.0]);
        let conv = ColorConvention::bt709();
        assert_eq!(psnr_y(&a, &a, &conv).unwrap(), f64::INFINITY);
        // Adding 16 to R, G and B adds 16 to Y since luma weights sum to 1.
        let b = cloud(a.attrs().iter().map(|v| v + 16.0).collect());
        let expect = 10.0 * (255.0f64 * 255.0 / 256.0).log10();
        assert!((psnr_y(&a, &b, &conv).unwrap() - expect).abs() < 1e-9);
        assert!((expect - 24.0484).abs() < 1e-4);
        assert_eq!(psnr_y(&a, &b, &conv).unwrap(), psnr_y(&b, &a, &conv).unwrap());
    }

    #[test]
    fn psnr_requires_same_geometry() {
        let a = cloud(vec![0.0; 6]);
        let b = cloud(vec![0.0; 3]);
        assert!(psnr_y(&a, &b, &ColorConvention::bt709()).is_err());
    }

    #[test]
    fn bpp_arithmetic() {
        let header = Header {
            transform: TransformKind::Ragft,
            depth: 1,
            block_sizes: vec![2],
            step: 1.0,
            predictor: PredictorConfig::none(),
            color: ColorSpace::Bt709,
            points: 1600,
            channels: 1,
        };
        let fill = 100 - header.byte_len() - 4;
        let b = Bitstream {
            header,
            payloads: vec![vec![0; fill]],
        };
        assert_eq!(b.byte_len(), 100);
        assert_eq!(bits_per_point(&b, 1600), 0.5);
        assert_eq!(bits_per_point(&b, 3200), 0.25);
        assert_eq!(payload_bits_per_point(&b, 1600), 8.0 * fill as f64 / 1600.0);
        let empty = Bitstream {
            payloads: vec![Vec::new()],
            ..b
        };
        assert_eq!(bits_per_point(&empty, 1), 8.0 * (empty.header.byte_len() + 4) as f64);
    }
}
