use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use iragft::codec::{decode_expecting, decode_full, encode, CodecConfig};
use iragft::entropy::Bitstream;
use iragft::eval::{
    bits_per_point, parse_codec_config, parse_sweep, payload_bits_per_point, preset, psnr_channels, rd_sweep,
    synth_cloud, write_csv, CloudSource, Field, Surface, SynthParams, PRESETS,
};
use iragft::pcgeom::{load_ply, save_ply, ColorConvention, PlyFormat, VoxelCloud};

#[derive(Parser)]
#[command(name = "iragft", version, about = "Intra-predicted RAGFT point cloud color codec")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compress the colors of a PLY cloud.
    Encode {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[command(flatten)]
        codec: CodecArgs,
    },
    /// Reconstruct colors on the given geometry.
    Decode {
        #[arg(long)]
        input: PathBuf,
        /// PLY file providing the point positions.
        #[arg(long)]
        geometry: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long)]
        ascii: bool,
        /// Reject bitstreams whose header differs from these settings.
        #[arg(long)]
        expect: bool,
        #[command(flatten)]
        codec: CodecArgs,
    },
    /// Encode and decode one cloud and report rate and distortion.
    Eval {
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        codec: CodecArgs,
    },
    /// Rate-distortion sweep described by a key-value file, written as CSV.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a synthetic test cloud.
    Synth {
        #[arg(long, value_enum, default_value_t = SurfaceArg::Sphere)]
        surface: SurfaceArg,
        #[arg(long, default_value_t = 4096)]
        points: usize,
        #[arg(long, default_value_t = 6)]
        depth: u32,
        #[arg(long, value_enum, default_value_t = FieldArg::SmoothSinusoid)]
        field: FieldArg,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        output: PathBuf,
        #[arg(long)]
        ascii: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SurfaceArg {
    Sphere,
    Cube,
    Plane,
}

#[derive(Clone, Copy, ValueEnum)]
enum FieldArg {
    Constant,
    TrilinearRamp,
    SmoothSinusoid,
    Random,
}

#[derive(Args)]
struct CodecArgs {
    /// Starting configuration: i-ragft, i-ragft-lowres, ragft-b2, ragft-b16, i-raht or raht.
    #[arg(long)]
    preset: Option<String>,
    /// File of `key = value` codec options, applied after the preset.
    #[arg(long = "codec-config")]
    codec_config: Option<PathBuf>,
    #[arg(long)]
    transform: Option<String>,
    /// Comma-separated block sizes for the finest levels.
    #[arg(long)]
    blocks: Option<String>,
    #[arg(long)]
    predictor: Option<String>,
    #[arg(long)]
    k: Option<u16>,
    #[arg(long)]
    step: Option<f64>,
    #[arg(long)]
    color: Option<String>,
}

impl CodecArgs {
    fn resolve(&self) -> Result<CodecConfig> {
        let mut config = match &self.preset {
            Some(name) => preset(name, 16.0)
                .with_context(|| format!("unknown preset {name:?}; choose one of {}", PRESETS.join(", ")))?,
            None => CodecConfig::default(),
        };
        if let Some(path) = &self.codec_config {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let mut pairs = Vec::new();
            for line in text.lines() {
                let line = line.split('#').next().unwrap_or("").trim();
                if line.is_empty() {
                    continue;
                }
                let (key, value) = line
                    .split_once('=')
                    .with_context(|| format!("expected key = value: {line:?}"))?;
                pairs.push((key.trim().to_string(), value.trim().to_string()));
            }
            let borrowed: Vec<(&str, &str)> = pairs.iter().map(|(k, v)| (k.as_str(), v.as_str())).collect();
            config = parse_codec_config(config, &borrowed)?;
        }
        let k = self.k.map(|k| k.to_string());
        let step = self.step.map(|s| s.to_string());
        let flags = [
            ("transform", self.transform.as_deref()),
            ("blocks", self.blocks.as_deref()),
            ("predictor", self.predictor.as_deref()),
            ("k", k.as_deref()),
            ("step", step.as_deref()),
            ("color", self.color.as_deref()),
        ];
        let pairs: Vec<(&str, &str)> = flags.iter().filter_map(|&(key, v)| v.map(|v| (key, v))).collect();
        Ok(parse_codec_config(config, &pairs)?)
    }
}

fn load(path: &Path) -> Result<VoxelCloud> {
    load_ply(path).with_context(|| format!("reading {}", path.display()))
}

fn read_bitstream(path: &Path) -> Result<Bitstream> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Bitstream::from_bytes(&bytes).with_context(|| format!("parsing {}", path.display()))
}

fn ply_format(ascii: bool) -> PlyFormat {
    if ascii {
        PlyFormat::Ascii
    } else {
        PlyFormat::BinaryLittleEndian
    }
}

fn describe(config: &CodecConfig) -> String {
    format!(
        "transform={} blocks={:?} predictor={} k={} step={} color={}",
        config.transform.name(),
        config.block_sizes,
        config.predictor.kind.name(),
        config.predictor.k,
        config.step,
        config.color.name()
    )
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Encode { input, output, codec } => {
            let config = codec.resolve()?;
            let cloud = load(&input)?;
            let out = encode(&cloud, &config)?;
            let bytes = out.bitstream.to_bytes()?;
            fs::write(&output, &bytes).with_context(|| format!("writing {}", output.display()))?;
            println!(
                "{} points, {} bytes, {:.4} bpp ({})",
                cloud.len(),
                bytes.len(),
                bits_per_point(&out.bitstream, cloud.len()),
                describe(&config)
            );
        }
        Command::Decode {
            input,
            geometry,
            output,
            ascii,
            expect,
            codec,
        } => {
            let bitstream = read_bitstream(&input)?;
            let geom = load(&geometry)?;
            let decoded = if expect {
                decode_expecting(&bitstream, &geom, &codec.resolve()?)?
            } else {
                decode_full(&bitstream, &geom)?.reconstruction
            };
            save_ply(&output, &decoded, ply_format(ascii)).with_context(|| format!("writing {}", output.display()))?;
            println!("{} points decoded to {}", decoded.len(), output.display());
        }
        Command::Eval { input, codec } => {
            let config = codec.resolve()?;
            let cloud = load(&input)?;
            let out = encode(&cloud, &config)?;
            let bitstream = Bitstream::from_bytes(&out.bitstream.to_bytes()?)?;
            let decoded = decode_full(&bitstream, &cloud)?.reconstruction;
            let psnr = psnr_channels(&cloud, &decoded, &ColorConvention::for_space(config.color))?;
            println!("config: {}", describe(&config));
            println!("points: {}", cloud.len());
            println!("bytes: {}", bitstream.byte_len());
            println!("bpp: {:.6}", bits_per_point(&bitstream, cloud.len()));
            println!("payload_bpp: {:.6}", payload_bits_per_point(&bitstream, cloud.len()));
            for (name, p) in ["psnr_y", "psnr_u", "psnr_v"].iter().zip(&psnr) {
                println!("{name}: {p:.4}");
            }
        }
        Command::Sweep { config, out } => {
            let text = fs::read_to_string(&config).with_context(|| format!("reading {}", config.display()))?;
            let dir = config.parent().unwrap_or(Path::new("."));
            let spec = parse_sweep(&text, dir)?;
            let cloud = match &spec.source {
                CloudSource::Ply(p) => load(p)?,
                CloudSource::Synth(p) => synth_cloud(p)?,
            };
            let rows = rd_sweep(&cloud, &spec.configs, &spec.steps)?;
            match out.or(spec.output) {
                Some(path) => {
                    let f = fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?;
                    write_csv(f, &rows)?;
                    println!("{} rows written to {}", rows.len(), path.display());
                }
                None => write_csv(std::io::stdout().lock(), &rows)?,
            }
        }
        Command::Synth {
            surface,
            points,
            depth,
            field,
            seed,
            output,
            ascii,
        } => {
            let surface = match surface {
                SurfaceArg::Sphere => Surface::Sphere,
                SurfaceArg::Cube => Surface::Cube,
                SurfaceArg::Plane => Surface::Plane,
            };
            let field = match field {
                FieldArg::Constant => Field::Constant,
                FieldArg::TrilinearRamp => Field::TrilinearRamp,
                FieldArg::SmoothSinusoid => Field::SmoothSinusoid,
                FieldArg::Random => Field::Random,
            };
            let cloud = synth_cloud(&SynthParams {
                surface,
                points,
                depth,
                field,
                seed,
            })?;
            save_ply(&output, &cloud, ply_format(ascii)).with_context(|| format!("writing {}", output.display()))?;
            println!("{} points written to {}", cloud.len(), output.display());
        }
    }
    Ok(())
}

fn main() {
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
