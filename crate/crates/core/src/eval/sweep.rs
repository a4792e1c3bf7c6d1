//! Rate-distortion sweeps.

use std::io::{Read, Write};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{bits_per_point, payload_bits_per_point, psnr_channels};
use crate::codec::{decode, encode, CodecConfig};
use crate::error::Result;
use crate::pcgeom::{ColorConvention, VoxelCloud};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RdPoint {
    pub config: String,
    pub step: f64,
    pub bpp: f64,
    pub psnr_y: f64,
    pub encode_ms: f64,
    pub decode_ms: f64,
    pub psnr_u: f64,
    pub psnr_v: f64,
    pub payload_bpp: f64,
}

fn run_point(cloud: &VoxelCloud, name: &str, config: &CodecConfig) -> Result<RdPoint> {
    let t0 = Instant::now();
    let out = encode(cloud, config)?;
    let encode_ms = t0.elapsed().as_secs_f64() * 1e3;
    let bytes = out.bitstream.to_bytes()?;
    let t1 = Instant::now();
    let parsed = crate::entropy::Bitstream::from_bytes(&bytes)?;
    let decoded = decode(&parsed, cloud)?;
    let decode_ms = t1.elapsed().as_secs_f64() * 1e3;
    let conv = ColorConvention::for_space(config.color);
    let p = psnr_channels(cloud, &decoded, &conv)?;
    let at = |c: usize| p.get(c).copied().unwrap_or(f64::NAN);
    Ok(RdPoint {
        config: name.to_string(),
        step: config.step,
        bpp: bits_per_point(&parsed, cloud.len()),
        psnr_y: at(0),
        encode_ms,
        decode_ms,
        psnr_u: at(1),
        psnr_v: at(2),
        payload_bpp: payload_bits_per_point(&parsed, cloud.len()),
    })
}

/// One encode and decode per `(config, step)`, evaluated in parallel and
/// returned in config-major, step-minor order. The step of each config
/// is replaced by the sweep step.
pub fn rd_sweep(cloud: &VoxelCloud, configs: &[(String, CodecConfig)], steps: &[f64]) -> Result<Vec<RdPoint>> {
    let jobs: Vec<(&str, CodecConfig)> = configs
        .iter()
        .flat_map(|(name, c)| steps.iter().map(move |&s| (name.as_str(), c.with_step(s))))
        .collect();
    jobs.par_iter().map(|(name, c)| run_point(cloud, name, c)).collect()
}

pub fn write_csv<W: Write>(out: W, rows: &[RdPoint]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<RdPoint>> {
    let mut r = csv::Reader::from_reader(input);
    let mut rows = Vec::new();
    for row in r.deserialize() {
        rows.push(row?);
    }
    Ok(rows)
}

/// PSNR of a rate-distortion curve at `bpp`, linearly interpolated between
/// neighboring points and extrapolated from the end segments. `None` for
/// curves with fewer than two distinct rates.
pub fn psnr_at_rate(curve: &[RdPoint], bpp: f64) -> Option<f64> {
    let mut pts: Vec<(f64, f64)> = curve
        .iter()
        .filter(|p| p.psnr_y.is_finite())
        .map(|p| (p.bpp, p.psnr_y))
        .collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    pts.dedup_by(|a, b| a.0 == b.0);
    if pts.len() < 2 {
        return None;
    }
    let i = pts.partition_point(|p| p.0 < bpp).clamp(1, pts.len() - 1);
    let ((x0, y0), (x1, y1)) = (pts[i - 1], pts[i]);
    Some(y0 + (y1 - y0) * (bpp - x0) / (x1 - x0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(bpp: f64, psnr_y: f64) -> RdPoint {
        RdPoint {
            config: "x".into(),
            step: 1.0,
            bpp,
            psnr_y,
            encode_ms: 0.0,
            decode_ms: 0.0,
            psnr_u: f64::INFINITY,
            psnr_v: 1.5,
            payload_bpp: 0.0,
        }
    }

    #[test]
    fn interpolation() {
        let c = [pt(2.0, 40.0), pt(1.0, 30.0), pt(0.5, 26.0)];
        assert_eq!(psnr_at_rate(&c, 1.5), Some(35.0));
        assert_eq!(psnr_at_rate(&c, 3.0), Some(50.0));
        assert_eq!(psnr_at_rate(&c, 0.25), Some(24.0));
        assert_eq!(psnr_at_rate(&c[..1], 1.0), None);
    }

    #[test]
    fn csv_roundtrip() {
        let rows = vec![pt(0.123456789, 31.25), pt(2.0, f64::INFINITY)];
        let mut buf = Vec::new();
        write_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("config,step,bpp,psnr_y,encode_ms,decode_ms,"));
        assert_eq!(read_csv(&buf[..]).unwrap(), rows);
    }
}
