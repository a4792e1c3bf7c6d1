//! Uniform scalar quantization.

use crate::error::{Error, Result};

/// Uniform quantizer step `Δ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuantParams {
    step: f64,
}

impl QuantParams {
    pub fn new(step: f64) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::Config(format!(
                "quantization step must be positive and finite, got {step}"
            )));
        }
        Ok(Self { step })
    }

    pub fn step(self) -> f64 {
        self.step
    }

    /// `round(x / Δ)`, halves rounded away from zero.
    #[inline]
    pub fn quantize_one(self, x: f64) -> i64 {
        (x / self.step).round() as i64
    }

    #[inline]
    pub fn dequantize_one(self, q: i64) -> f64 {
        q as f64 * self.step
    }

    pub fn quantize(self, x: &[f64]) -> Vec<i64> {
        x.iter().map(|&v| self.quantize_one(v)).collect()
    }

    pub fn dequantize(self, q: &[i64]) -> Vec<f64> {
        q.iter().map(|&v| self.dequantize_one(v)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rounding() {
        let q = QuantParams::new(1.0).unwrap();
        assert_eq!(q.quantize(&[0.0, 3.5, -3.5, 2.49, -0.5]), vec![0, 4, -4, 2, -1]);
        let h = QuantParams::new(0.5).unwrap();
        assert_eq!(h.dequantize(&[0, 4]), vec![0.0, 2.0]);
    }

    #[test]
    fn rejects_bad_steps() {
        assert!(QuantParams::new(0.0).is_err());
        assert!(QuantParams::new(-1.0).is_err());
        assert!(QuantParams::new(f64::NAN).is_err());
    }

    proptest! {
        #[test]
        fn error_bounded_by_half_step(x in -1e6..1e6f64, step in 1e-3..100.0f64) {
            let q = QuantParams::new(step).unwrap();
            let err = (q.dequantize_one(q.quantize_one(x)) - x).abs();
            prop_assert!(err <= step / 2.0 * (1.0 + 1e-12));
        }
    }
}
