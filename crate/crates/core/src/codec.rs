//! Closed-loop intra-predictive encoder and decoder.
//!
//! Both sides run the same level recursion on decoded quantities:
//!
//! ```text
//! â_0     = Q⁻¹(Φ̂_0)
//! d̃_l     = P_l(â_l)
//! Δ̂_l     = Q(d_l − d̃_l)          encoder only
//! d̂_l     = d̃_l + Q⁻¹(Δ̂_l)
//! â_{l+1} = T_l⁻¹[â_l; d̂_l]
//! ```
//!
//! so the encoder's reconstruction is bit-identical to the decoder output.
//! Color channels go through the loop independently and in parallel.

use rayon::prelude::*;

use crate::entropy::{rlgr_decode, rlgr_encode, Bitstream, Header, QuantParams};
use crate::error::{Error, Result};
use crate::pcgeom::{ColorConvention, ColorSpace, Voxel, VoxelCloud};
use crate::predict::{Predictor, PredictorConfig};
use crate::ragft::{BlockSizes, CoefficientLayout, MultiresTransform, Ragft, ResolutionHierarchy};
use crate::raht::Raht;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TransformKind {
    Ragft = 0,
    Raht = 1,
}

impl TransformKind {
    pub fn from_id(id: u8) -> Option<Self> {
        match id {
            0 => Some(Self::Ragft),
            1 => Some(Self::Raht),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Ragft => "ragft",
            Self::Raht => "raht",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ragft" | "gft" => Some(Self::Ragft),
            "raht" | "haar" => Some(Self::Raht),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CodecConfig {
    pub transform: TransformKind,
    /// Block sizes for the finest levels; the remaining levels use 2.
    pub block_sizes: Vec<u32>,
    pub predictor: PredictorConfig,
    pub step: f64,
    pub color: ColorSpace,
}

impl Default for CodecConfig {
    fn default() -> Self {
        Self::i_ragft(16.0)
    }
}

impl CodecConfig {
    /// RAGFT with dyadic blocks and the graph-smoothing predictor.
    pub fn i_ragft(step: f64) -> Self {
        Self {
            transform: TransformKind::Ragft,
            block_sizes: vec![2],
            predictor: PredictorConfig::proposed(),
            step,
            color: ColorSpace::Bt709,
        }
    }

    pub fn i_ragft_lowres(step: f64) -> Self {
        Self {
            predictor: PredictorConfig::lowres(),
            ..Self::i_ragft(step)
        }
    }

    pub fn ragft_b2(step: f64) -> Self {
        Self {
            predictor: PredictorConfig::none(),
            ..Self::i_ragft(step)
        }
    }

    pub fn ragft_b16(step: f64) -> Self {
        Self {
            block_sizes: vec![16],
            ..Self::ragft_b2(step)
        }
    }

    /// RAHT with the same predictor, quantizer and entropy coder.
    pub fn i_raht(step: f64) -> Self {
        Self {
            transform: TransformKind::Raht,
            ..Self::i_ragft(step)
        }
    }

    pub fn raht(step: f64) -> Self {
        Self {
            predictor: PredictorConfig::none(),
            ..Self::i_raht(step)
        }
    }

    pub fn with_step(&self, step: f64) -> Self {
        Self { step, ..self.clone() }
    }

    pub fn block_sizes_for(&self, depth: u32) -> Result<BlockSizes> {
        BlockSizes::expand(&self.block_sizes, depth)
    }

    pub fn quant(&self) -> Result<QuantParams> {
        QuantParams::new(self.step)
    }
}

/// Quantized symbols `[Φ̂_0 | Δ̂_0 | ... | Δ̂_{L-1}]` of one channel.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidualLayout {
    pub values: Vec<i64>,
    pub offsets: Vec<usize>,
}

impl ResidualLayout {
    fn segment(&self, s: usize) -> &[i64] {
        let end = self.offsets.get(s + 1).copied().unwrap_or(self.values.len());
        &self.values[self.offsets[s]..end]
    }

    pub fn approx(&self) -> &[i64] {
        self.segment(0)
    }

    pub fn residual(&self, l: usize) -> &[i64] {
        self.segment(l + 1)
    }
}

/// Geometry-dependent state shared by encoder and decoder.
pub struct CodecContext {
    transform_kind: TransformKind,
    transform: Box<dyn MultiresTransform>,
    predictor: Predictor,
}

impl CodecContext {
    pub fn new(
        coords: &[Voxel],
        depth: u32,
        transform: TransformKind,
        block_sizes: &BlockSizes,
        predictor: PredictorConfig,
    ) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::EmptyPointSet);
        }
        let hier = ResolutionHierarchy::build(coords, depth, block_sizes)?;
        let predictor = Predictor::new(predictor, &hier)?;
        let boxed: Box<dyn MultiresTransform> = match transform {
            TransformKind::Ragft => Box::new(Ragft::new(hier)?),
            TransformKind::Raht => Box::new(Raht::new(hier)?),
        };
        Ok(Self {
            transform_kind: transform,
            transform: boxed,
            predictor,
        })
    }

    pub fn for_config(cloud: &VoxelCloud, config: &CodecConfig) -> Result<Self> {
        let sizes = config.block_sizes_for(cloud.depth())?;
        Self::new(
            cloud.coords(),
            cloud.depth(),
            config.transform,
            &sizes,
            config.predictor,
        )
    }

    pub fn hierarchy(&self) -> &ResolutionHierarchy {
        self.transform.hierarchy()
    }

    pub fn transform(&self) -> &dyn MultiresTransform {
        &*self.transform
    }

    pub fn transform_kind(&self) -> TransformKind {
        self.transform_kind
    }

    pub fn predictor(&self) -> &Predictor {
        &self.predictor
    }

    /// Runs the prediction loop for one Morton-ordered channel, drawing the
    /// level-`l` residual symbols from `residual(l, prediction)`. Returns
    /// all symbols and the reconstructed signal.
    fn run_loop(
        &self,
        q: QuantParams,
        approx_symbols: Vec<i64>,
        mut residual: impl FnMut(usize, &[f64]) -> Result<Vec<i64>>,
    ) -> Result<(ResidualLayout, Vec<f64>)> {
        let t = self.transform();
        let hier = t.hierarchy();
        let mut a_hat = q.dequantize(&approx_symbols);
        let mut values = approx_symbols;
        values.reserve(hier.len() - values.len());
        for l in 0..hier.depth_levels() {
            let pred = self.predictor.predict(t, l, &a_hat)?;
            let r = residual(l, &pred)?;
            let d_hat: Vec<f64> = pred.iter().zip(&r).map(|(&p, &s)| p + q.dequantize_one(s)).collect();
            a_hat = t.inverse_level(l, &a_hat, &d_hat)?;
            values.extend(r);
        }
        Ok((
            ResidualLayout {
                values,
                offsets: CoefficientLayout::offsets_for(hier),
            },
            a_hat,
        ))
    }

    /// Closed-loop encoding of one channel given in Morton order.
    pub fn encode_channel(&self, signal: &[f64], q: QuantParams) -> Result<(ResidualLayout, Vec<f64>)> {
        let coeffs = self.transform.forward_full(signal)?;
        self.run_loop(q, q.quantize(coeffs.approx()), |l, pred| {
            Ok(coeffs
                .detail(l)
                .iter()
                .zip(pred)
                .map(|(&d, &p)| q.quantize_one(d - p))
                .collect())
        })
    }

    /// Reconstruction of one channel, in Morton order, from its symbols.
    pub fn decode_channel(&self, symbols: &[i64], q: QuantParams) -> Result<Vec<f64>> {
        let hier = self.hierarchy();
        if symbols.len() != hier.len() {
            return Err(Error::LengthMismatch {
                expected: hier.len(),
                got: symbols.len(),
            });
        }
        let layout = ResidualLayout {
            values: symbols.to_vec(),
            offsets: CoefficientLayout::offsets_for(hier),
        };
        let (_, recon) = self.run_loop(q, layout.approx().to_vec(), |l, _| Ok(layout.residual(l).to_vec()))?;
        Ok(recon)
    }
}

/// Encoder outputs, including its in-loop view of the decoded cloud.
#[derive(Clone, Debug)]
pub struct EncodeOutput {
    pub bitstream: Bitstream,
    pub residuals: Vec<ResidualLayout>,
    /// Decoded attributes in the coding color space, unclamped.
    pub coded: VoxelCloud,
    /// Decoded colors after inverse color conversion and clamping.
    pub reconstruction: VoxelCloud,
}

fn clamp_colors(cloud: &VoxelCloud) -> Result<VoxelCloud> {
    let attrs = cloud.attrs().iter().map(|v| v.clamp(0.0, 255.0)).collect();
    cloud.with_attrs(attrs, cloud.channels())
}

fn header_for(config: &CodecConfig, cloud: &VoxelCloud, sizes: &BlockSizes) -> Result<Header> {
    let points = u32::try_from(cloud.len()).map_err(|_| Error::Config("too many points".into()))?;
    let channels = u8::try_from(cloud.channels()).map_err(|_| Error::Config("too many channels".into()))?;
    Ok(Header {
        transform: config.transform,
        depth: cloud.depth(),
        block_sizes: sizes.as_slice().to_vec(),
        step: config.step,
        predictor: config.predictor,
        color: config.color,
        points,
        channels,
    })
}

fn code_channels(
    ctx: &CodecContext,
    geometry: &VoxelCloud,
    signals: Vec<Vec<f64>>,
    color: &ColorConvention,
) -> Result<(VoxelCloud, VoxelCloud)> {
    let hier = ctx.hierarchy();
    let natural: Vec<Vec<f64>> = signals.iter().map(|s| hier.from_morton(s)).collect();
    let coded = geometry.with_channels(&natural)?;
    let reconstruction = clamp_colors(&color.yuv_to_rgb(&coded)?)?;
    Ok((coded, reconstruction))
}

/// Encodes with a prebuilt context, which must match `cloud` and `config`.
pub fn encode_with(ctx: &CodecContext, cloud: &VoxelCloud, config: &CodecConfig) -> Result<EncodeOutput> {
    let q = config.quant()?;
    let color = ColorConvention::for_space(config.color);
    let coded_in = color.rgb_to_yuv(cloud)?;
    let hier = ctx.hierarchy();
    let header = header_for(config, cloud, hier.block_sizes())?;
    let results: Vec<(ResidualLayout, Vec<f64>, Vec<u8>)> = (0..cloud.channels())
        .into_par_iter()
        .map(|c| {
            let signal = hier.to_morton(&coded_in.channel(c));
            let (layout, recon) = ctx.encode_channel(&signal, q)?;
            let payload = rlgr_encode(&layout.values);
            Ok((layout, recon, payload))
        })
        .collect::<Result<_>>()?;
    let mut residuals = Vec::with_capacity(results.len());
    let mut signals = Vec::with_capacity(results.len());
    let mut payloads = Vec::with_capacity(results.len());
    for (layout, recon, payload) in results {
        residuals.push(layout);
        signals.push(recon);
        payloads.push(payload);
    }
    let (coded, reconstruction) = code_channels(ctx, cloud, signals, &color)?;
    Ok(EncodeOutput {
        bitstream: Bitstream { header, payloads },
        residuals,
        coded,
        reconstruction,
    })
}

pub fn encode(cloud: &VoxelCloud, config: &CodecConfig) -> Result<EncodeOutput> {
    let ctx = CodecContext::for_config(cloud, config)?;
    encode_with(&ctx, cloud, config)
}

/// Decoded cloud in the coding color space (unclamped) and in RGB.
#[derive(Clone, Debug)]
pub struct DecodeOutput {
    pub coded: VoxelCloud,
    pub reconstruction: VoxelCloud,
}

fn geometry_for(bitstream: &Bitstream, geometry: &VoxelCloud) -> Result<VoxelCloud> {
    let h = &bitstream.header;
    if geometry.len() != h.points as usize {
        return Err(Error::HeaderMismatch(format!(
            "geometry has {} points, bitstream expects {}",
            geometry.len(),
            h.points
        )));
    }
    if bitstream.payloads.len() != h.channels as usize {
        return Err(Error::HeaderMismatch("payload count differs from channel count".into()));
    }
    if !(h.step > 0.0 && h.step.is_finite()) {
        return Err(Error::Corrupt(format!("quantization step {}", h.step)));
    }
    let g = VoxelCloud::geometry(geometry.coords().to_vec(), geometry.depth())?;
    if g.depth() == h.depth {
        Ok(g)
    } else {
        g.with_depth(h.depth)
            .map_err(|e| Error::HeaderMismatch(format!("geometry does not fit depth {}: {e}", h.depth)))
    }
}

/// Decodes with a prebuilt context, which must match the bitstream header.
pub fn decode_with(ctx: &CodecContext, bitstream: &Bitstream, geometry: &VoxelCloud) -> Result<DecodeOutput> {
    let h = &bitstream.header;
    let geom = geometry_for(bitstream, geometry)?;
    let q = QuantParams::new(h.step)?;
    let n = geom.len();
    let signals: Vec<Vec<f64>> = bitstream
        .payloads
        .par_iter()
        .map(|p| ctx.decode_channel(&rlgr_decode(p, n)?, q))
        .collect::<Result<_>>()?;
    let color = ColorConvention::for_space(h.color);
    let (coded, reconstruction) = code_channels(ctx, &geom, signals, &color)?;
    Ok(DecodeOutput { coded, reconstruction })
}

pub fn decode_full(bitstream: &Bitstream, geometry: &VoxelCloud) -> Result<DecodeOutput> {
    let h = &bitstream.header;
    let geom = geometry_for(bitstream, geometry)?;
    let sizes = BlockSizes::new(h.block_sizes.clone(), h.depth)?;
    let ctx = CodecContext::new(geom.coords(), h.depth, h.transform, &sizes, h.predictor)?;
    decode_with(&ctx, bitstream, &geom)
}

/// Decoded RGB cloud on the given geometry.
pub fn decode(bitstream: &Bitstream, geometry: &VoxelCloud) -> Result<VoxelCloud> {
    Ok(decode_full(bitstream, geometry)?.reconstruction)
}

/// Like [`decode`], but first checks the header against `config`.
pub fn decode_expecting(bitstream: &Bitstream, geometry: &VoxelCloud, config: &CodecConfig) -> Result<VoxelCloud> {
    let h = &bitstream.header;
    let sizes = config.block_sizes_for(h.depth)?;
    let mut diffs = Vec::new();
    if h.transform != config.transform {
        diffs.push(format!(
            "transform {} vs {}",
            h.transform.name(),
            config.transform.name()
        ));
    }
    if h.block_sizes != sizes.as_slice() {
        diffs.push(format!("block sizes {:?} vs {:?}", h.block_sizes, sizes.as_slice()));
    }
    if h.predictor != config.predictor {
        diffs.push(format!(
            "predictor {}/{} vs {}/{}",
            h.predictor.kind.name(),
            h.predictor.k,
            config.predictor.kind.name(),
            config.predictor.k
        ));
    }
    if h.step.to_bits() != config.step.to_bits() {
        diffs.push(format!("step {} vs {}", h.step, config.step));
    }
    if h.color != config.color {
        diffs.push(format!("color {} vs {}", h.color.name(), config.color.name()));
    }
    if !diffs.is_empty() {
        return Err(Error::HeaderMismatch(diffs.join(", ")));
    }
    decode(bitstream, geometry)
}
