//! Container format.
//!
//! ```text
//! magic      4   b"RGFT"
//! version    u16
//! transform  u8    0 = ragft, 1 = raht
//! depth      u8
//! n_blocks   u8,   then n_blocks x u8 log2 block size, finest first
//! step       f64
//! predictor  u8,   k u16
//! color      u8
//! points     u32
//! channels   u8,   then per channel u32 length + RLGR payload
//! ```
//!
//! Multi-byte fields are little-endian.

use crate::codec::TransformKind;
use crate::error::{Error, Result};
use crate::pcgeom::ColorSpace;
use crate::predict::{PredictorConfig, PredictorKind};

pub const MAGIC: [u8; 4] = *b"RGFT";
pub const VERSION: u16 = 1;

#[derive(Clone, Debug, PartialEq)]
pub struct Header {
    pub transform: TransformKind,
    pub depth: u32,
    /// Finest level first.
    pub block_sizes: Vec<u32>,
    pub step: f64,
    pub predictor: PredictorConfig,
    pub color: ColorSpace,
    pub points: u32,
    pub channels: u8,
}

impl Header {
    /// Serialized size in bytes.
    pub fn byte_len(&self) -> usize {
        4 + 2 + 1 + 1 + 1 + self.block_sizes.len() + 8 + 1 + 2 + 1 + 4 + 1
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Bitstream {
    pub header: Header,
    pub payloads: Vec<Vec<u8>>,
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.bytes.len())
            .ok_or(Error::Truncated)?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn array<const N: usize>(&mut self) -> Result<[u8; N]> {
        Ok(self.take(N)?.try_into().expect("length checked"))
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.array::<1>()?[0])
    }
}

impl Bitstream {
    pub fn payload_bytes(&self) -> usize {
        self.payloads.iter().map(Vec::len).sum()
    }

    /// Total serialized size.
    pub fn byte_len(&self) -> usize {
        self.header.byte_len() + 4 * self.payloads.len() + self.payload_bytes()
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let h = &self.header;
        if self.payloads.len() != h.channels as usize {
            return Err(Error::HeaderMismatch(format!(
                "{} payloads for {} channels",
                self.payloads.len(),
                h.channels
            )));
        }
        let depth = u8::try_from(h.depth).map_err(|_| Error::Config(format!("depth {} too large", h.depth)))?;
        let nblocks = u8::try_from(h.block_sizes.len()).map_err(|_| Error::Config("too many block levels".into()))?;
        let mut out = Vec::with_capacity(self.byte_len());
        out.extend_from_slice(&MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.push(h.transform as u8);
        out.push(depth);
        out.push(nblocks);
        for &b in &h.block_sizes {
            if !b.is_power_of_two() {
                return Err(Error::InvalidBlockSize(b));
            }
            out.push(b.trailing_zeros() as u8);
        }
        out.extend_from_slice(&h.step.to_le_bytes());
        out.push(h.predictor.kind as u8);
        out.extend_from_slice(&h.predictor.k.to_le_bytes());
        out.push(h.color as u8);
        out.extend_from_slice(&h.points.to_le_bytes());
        out.push(h.channels);
        for p in &self.payloads {
            let len = u32::try_from(p.len()).map_err(|_| Error::Config("channel payload exceeds 4 GiB".into()))?;
            out.extend_from_slice(&len.to_le_bytes());
            out.extend_from_slice(p);
        }
        Ok(out)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut c = Cursor { bytes, pos: 0 };
        if c.array::<4>()? != MAGIC {
            return Err(Error::BadMagic);
        }
        let version = u16::from_le_bytes(c.array()?);
        if version != VERSION {
            return Err(Error::UnsupportedVersion(version));
        }
        let transform_id = c.u8()?;
        let transform = TransformKind::from_id(transform_id)
            .ok_or_else(|| Error::Corrupt(format!("unknown transform id {transform_id}")))?;
        let depth = c.u8()? as u32;
        let nblocks = c.u8()? as usize;
        let mut block_sizes = Vec::with_capacity(nblocks);
        for _ in 0..nblocks {
            let log2 = c.u8()?;
            if log2 == 0 || log2 > 20 {
                return Err(Error::Corrupt(format!("block size exponent {log2}")));
            }
            block_sizes.push(1u32 << log2);
        }
        let step = f64::from_le_bytes(c.array()?);
        let kind_id = c.u8()?;
        let kind =
            PredictorKind::from_id(kind_id).ok_or_else(|| Error::Corrupt(format!("unknown predictor id {kind_id}")))?;
        let k = u16::from_le_bytes(c.array()?);
        let predictor = PredictorConfig::new(kind, k).map_err(|e| Error::Corrupt(e.to_string()))?;
        let color_id = c.u8()?;
        let color = ColorSpace::from_id(color_id)
            .ok_or_else(|| Error::Corrupt(format!("unknown color space id {color_id}")))?;
        let points = u32::from_le_bytes(c.array()?);
        let channels = c.u8()?;
        let mut payloads = Vec::with_capacity(channels as usize);
        for _ in 0..channels {
            let len = u32::from_le_bytes(c.array()?) as usize;
            payloads.push(c.take(len)?.to_vec());
        }
        if c.pos != bytes.len() {
            return Err(Error::SurplusData);
        }
        let header = Header {
            transform,
            depth,
            block_sizes,
            step,
            predictor,
            color,
            points,
            channels,
        };
        Ok(Self { header, payloads })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample() -> Bitstream {
        Bitstream {
            header: Header {
                transform: TransformKind::Ragft,
                depth: 10,
                block_sizes: vec![16, 2, 2, 2, 2, 2, 2],
                step: 16.0,
                predictor: PredictorConfig::proposed(),
                color: ColorSpace::Bt709,
                points: 4096,
                channels: 3,
            },
            payloads: vec![vec![1, 2, 3], Vec::new(), vec![0xff; 10]],
        }
    }

    #[test]
    fn roundtrip_with_empty_channel() {
        let b = sample();
        let bytes = b.to_bytes().unwrap();
        assert_eq!(bytes.len(), b.byte_len());
        assert_eq!(&bytes[..4], b"RGFT");
        assert_eq!(Bitstream::from_bytes(&bytes).unwrap(), b);
    }

    #[test]
    fn little_endian_fields() {
        let bytes = sample().to_bytes().unwrap();
        assert_eq!(&bytes[4..6], &[1, 0]);
        assert_eq!(bytes[7], 10);
        assert_eq!(&bytes[9..16], &[4, 1, 1, 1, 1, 1, 1]);
        assert_eq!(&bytes[16..24], &16f64.to_le_bytes());
        assert_eq!(&bytes[25..27], &[7, 0]);
        assert_eq!(&bytes[28..32], &[0, 16, 0, 0]);
        assert_eq!(&bytes[33..37], &[3, 0, 0, 0]);
    }

    #[test]
    fn rejects_bad_input() {
        let bytes = sample().to_bytes().unwrap();
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(matches!(Bitstream::from_bytes(&bad), Err(Error::BadMagic)));
        let mut bad = bytes.clone();
        bad[4] = 9;
        assert!(matches!(Bitstream::from_bytes(&bad), Err(Error::UnsupportedVersion(9))));
        assert!(matches!(
            Bitstream::from_bytes(&bytes[..bytes.len() - 1]),
            Err(Error::Truncated)
        ));
        let mut long = bytes.clone();
        long.push(0);
        assert!(matches!(Bitstream::from_bytes(&long), Err(Error::SurplusData)));
        assert!(matches!(Bitstream::from_bytes(b"RG"), Err(Error::Truncated)));
    }

    proptest! {
        #[test]
        fn random_header_roundtrip(
            raht in any::<bool>(),
            logs in prop::collection::vec(1u32..5, 0..8),
            step in 1e-6..1e3f64,
            kind in 0u8..3,
            k in 1u16..40,
            color in 0u8..3,
            points in any::<u32>(),
            payloads in prop::collection::vec(prop::collection::vec(any::<u8>(), 0..20), 0..5),
        ) {
            let block_sizes: Vec<u32> = logs.iter().map(|&l| 1 << l).collect();
            let b = Bitstream {
                header: Header {
                    transform: if raht { TransformKind::Raht } else { TransformKind::Ragft },
                    depth: logs.iter().sum(),
                    block_sizes,
                    step,
                    predictor: PredictorConfig::new(PredictorKind::from_id(kind).unwrap(), k).unwrap(),
                    color: ColorSpace::from_id(color).unwrap(),
                    points,
                    channels: payloads.len() as u8,
                },
                payloads,
            };
            prop_assert_eq!(Bitstream::from_bytes(&b.to_bytes().unwrap()).unwrap(), b);
        }
    }
}
