//! Key-value sweep descriptions.
//!
//! ```text
//! # sphere.cfg
//! synth  = sphere
//! points = 4096
//! depth  = 6
//! field  = smooth-sinusoid
//! steps  = 8, 16, 32, 64
//! config = i-ragft
//! config = lowres3 base=i-ragft-lowres k=3
//! config = haar transform=raht predictor=none
//! ```
//!
//! `input = cloud.ply` replaces the `synth` keys. A `config` line is a name
//! followed by overrides; the name doubles as the base preset when no
//! `base` is given and it names one.

use std::path::{Path, PathBuf};

use super::synth::{Field, Surface, SynthParams};
use crate::codec::{CodecConfig, TransformKind};
use crate::error::{Error, Result};
use crate::pcgeom::ColorSpace;
use crate::predict::{PredictorConfig, PredictorKind};

pub const PRESETS: [&str; 6] = ["i-ragft", "i-ragft-lowres", "ragft-b2", "ragft-b16", "i-raht", "raht"];

pub fn preset(name: &str, step: f64) -> Option<CodecConfig> {
    Some(match name {
        "i-ragft" => CodecConfig::i_ragft(step),
        "i-ragft-lowres" => CodecConfig::i_ragft_lowres(step),
        "ragft-b2" => CodecConfig::ragft_b2(step),
        "ragft-b16" => CodecConfig::ragft_b16(step),
        "i-raht" => CodecConfig::i_raht(step),
        "raht" => CodecConfig::raht(step),
        _ => return None,
    })
}

fn bad(key: &str, value: &str) -> Error {
    Error::Config(format!("invalid value {value:?} for {key}"))
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value.trim().parse().map_err(|_| bad(key, value))
}

/// Applies `key=value` overrides to `base`. A new predictor kind resets
/// `k` to that kind's default unless `k` is also given.
pub fn parse_codec_config(base: CodecConfig, pairs: &[(&str, &str)]) -> Result<CodecConfig> {
    let mut c = base;
    let mut kind = c.predictor.kind;
    let mut k = None;
    for &(key, value) in pairs {
        match key {
            "base" => {}
            "transform" => c.transform = TransformKind::parse(value).ok_or_else(|| bad(key, value))?,
            "blocks" | "block_sizes" => {
                c.block_sizes = value.split(',').map(|b| parse_num(key, b)).collect::<Result<_>>()?;
            }
            "predictor" => {
                kind = PredictorKind::parse(value).ok_or_else(|| bad(key, value))?;
                if kind != c.predictor.kind {
                    c.predictor = PredictorConfig::new(kind, kind.default_k())?;
                }
            }
            "k" => k = Some(parse_num::<u16>(key, value)?),
            "step" => c.step = parse_num(key, value)?,
            "color" => c.color = ColorSpace::parse(value).ok_or_else(|| bad(key, value))?,
            _ => return Err(Error::Config(format!("unknown codec option {key:?}"))),
        }
    }
    if let Some(k) = k {
        c.predictor = PredictorConfig::new(kind, k)?;
    }
    c.quant()?;
    Ok(c)
}

#[derive(Clone, Debug, PartialEq)]
pub enum CloudSource {
    Ply(PathBuf),
    Synth(SynthParams),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    pub source: CloudSource,
    pub steps: Vec<f64>,
    pub configs: Vec<(String, CodecConfig)>,
    pub output: Option<PathBuf>,
}

fn config_line(value: &str) -> Result<(String, CodecConfig)> {
    let mut tokens = value.split_whitespace();
    let name = tokens
        .next()
        .ok_or_else(|| Error::Config("config line without a name".into()))?;
    let pairs: Vec<(&str, &str)> = tokens
        .map(|t| {
            t.split_once('=')
                .ok_or_else(|| Error::Config(format!("expected key=value, got {t:?}")))
        })
        .collect::<Result<_>>()?;
    let base_name = pairs.iter().find(|(k, _)| *k == "base").map(|(_, v)| *v);
    let base = match base_name {
        Some(b) => preset(b, 16.0).ok_or_else(|| Error::Config(format!("unknown preset {b:?}")))?,
        None => preset(name, 16.0).unwrap_or_default(),
    };
    Ok((name.to_string(), parse_codec_config(base, &pairs)?))
}

/// Parses a sweep description; relative `input`/`output` paths resolve
/// against `dir`.
pub fn parse_sweep(text: &str, dir: &Path) -> Result<SweepSpec> {
    let mut input = None;
    let mut surface = None;
    let mut synth = SynthParams::new(Surface::Sphere, 4096, 6, Field::SmoothSinusoid);
    let mut steps: Vec<f64> = vec![8.0, 16.0, 32.0, 64.0];
    let mut configs = Vec::new();
    let mut output = None;
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .ok_or_else(|| Error::Config(format!("line {}: expected key = value", no + 1)))?;
        match key {
            "input" => input = Some(dir.join(value)),
            "output" => output = Some(dir.join(value)),
            "synth" => surface = Some(Surface::parse(value).ok_or_else(|| bad(key, value))?),
            "points" => synth.points = parse_num(key, value)?,
            "depth" => synth.depth = parse_num(key, value)?,
            "field" => synth.field = Field::parse(value).ok_or_else(|| bad(key, value))?,
            "seed" => synth.seed = parse_num(key, value)?,
            "steps" => steps = value.split(',').map(|s| parse_num(key, s)).collect::<Result<_>>()?,
            "config" => configs.push(config_line(value)?),
            _ => return Err(Error::Config(format!("line {}: unknown key {key:?}", no + 1))),
        }
    }
    let source = match (input, surface) {
        (Some(_), Some(_)) => return Err(Error::Config("both input and synth given".into())),
        (Some(p), None) => CloudSource::Ply(p),
        (None, Some(s)) => CloudSource::Synth(SynthParams { surface: s, ..synth }),
        (None, None) => return Err(Error::Config("no input or synth cloud given".into())),
    };
    if configs.is_empty() {
        configs = PRESETS[..3]
            .iter()
            .map(|&n| (n.to_string(), preset(n, 16.0).expect("preset")))
            .collect();
    }
    if steps.is_empty() || steps.iter().any(|&s| !(s > 0.0 && s.is_finite())) {
        return Err(Error::Config("steps must be positive".into()));
    }
    Ok(SweepSpec {
        source,
        steps,
        configs,
        output,
    })
}
