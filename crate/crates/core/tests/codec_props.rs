use iragft::codec::{decode, encode, CodecConfig, CodecContext};
use iragft::entropy::{rlgr_encode, QuantParams};
use iragft::eval::{channel_mse, synth_cloud, Field, Surface, SynthParams};
use iragft::pcgeom::ColorConvention;
use iragft::pcgeom::ColorSpace;
use iragft::predict::PredictorConfig;

fn cloud(field: Field) -> iragft::pcgeom::VoxelCloud {
    synth_cloud(&SynthParams::new(Surface::Sphere, 1500, 6, field)).unwrap()
}

#[test]
fn tiny_step_is_near_lossless() {
    let c = cloud(Field::Random);
    for config in [
        CodecConfig::i_ragft(1e-6),
        CodecConfig::i_raht(1e-6),
        CodecConfig::ragft_b16(1e-6),
    ] {
        let out = encode(&c, &config).unwrap();
        let dec = decode(&out.bitstream, &c).unwrap();
        let se: f64 = dec.attrs().iter().zip(c.attrs()).map(|(a, b)| (a - b) * (a - b)).sum();
        let rms = (se / c.attrs().len() as f64).sqrt();
        assert!(rms < 1e-3, "{config:?}: rms {rms}");
    }
}

#[test]
fn no_predictor_matches_plain_transform_coding() {
    let c = cloud(Field::SmoothSinusoid);
    let config = CodecConfig::ragft_b2(8.0);
    let out = encode(&c, &config).unwrap();
    let ctx = CodecContext::for_config(&c, &config).unwrap();
    let yuv = ColorConvention::bt709().rgb_to_yuv(&c).unwrap();
    let q = QuantParams::new(8.0).unwrap();
    for ch in 0..3 {
        let signal = ctx.hierarchy().to_morton(&yuv.channel(ch));
        let coeffs = ctx.transform().forward_full(&signal).unwrap();
        let symbols = q.quantize(&coeffs.values);
        assert_eq!(out.residuals[ch].values, symbols);
        assert_eq!(out.bitstream.payloads[ch], rlgr_encode(&symbols));
    }
}

#[test]
fn error_energy_bounded_by_quantization_noise() {
    // Identity color keeps the bound in the coded domain without clamping.
    let c = cloud(Field::Random);
    for predictor in [
        PredictorConfig::none(),
        PredictorConfig::proposed(),
        PredictorConfig::lowres(),
    ] {
        for step in [1.0, 7.0, 32.0] {
            let config = CodecConfig {
                predictor,
                color: ColorSpace::Identity,
                ..CodecConfig::i_ragft(step)
            };
            let out = encode(&c, &config).unwrap();
            let err: f64 = out
                .coded
                .attrs()
                .iter()
                .zip(c.attrs())
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            let bound = c.attrs().len() as f64 * step * step / 4.0;
            assert!(
                err <= bound * (1.0 + 1e-6),
                "{predictor:?} step {step}: {err} > {bound}"
            );
        }
    }
}

#[test]
fn yuv_error_bounded_too() {
    let c = cloud(Field::SmoothSinusoid);
    let out = encode(&c, &CodecConfig::i_raht(16.0)).unwrap();
    let yuv = ColorConvention::bt709().rgb_to_yuv(&c).unwrap();
    let err: f64 = out
        .coded
        .attrs()
        .iter()
        .zip(yuv.attrs())
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    assert!(err <= yuv.attrs().len() as f64 * 64.0 * (1.0 + 1e-6));
}

#[test]
fn mse_nonincreasing_as_step_shrinks() {
    let c = cloud(Field::SmoothSinusoid);
    let conv = ColorConvention::bt709();
    for make in [CodecConfig::i_ragft, CodecConfig::ragft_b2, CodecConfig::i_raht] {
        let mut last = vec![f64::INFINITY; 3];
        for step in [64.0, 32.0, 16.0, 8.0, 4.0, 2.0, 1.0] {
            let out = encode(&c, &make(step)).unwrap();
            let mse = channel_mse(&c, &out.reconstruction, &conv).unwrap();
            for ch in 0..3 {
                assert!(
                    mse[ch] <= last[ch] * (1.0 + 1e-9),
                    "{:?} step {step} ch {ch}",
                    make(step).predictor
                );
            }
            last = mse;
        }
    }
}

#[test]
fn constant_field_codes_to_almost_nothing() {
    let c = cloud(Field::Constant);
    let out = encode(&c, &CodecConfig::ragft_b2(4.0)).unwrap();
    for r in &out.residuals {
        assert!(r.values[1..].iter().all(|&v| v == 0));
    }
    assert!(out.bitstream.payload_bytes() < 200);
}
