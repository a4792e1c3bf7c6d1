//! Adaptive run-length Golomb-Rice coding of signed integers.
//!
//! Two backward-adapted parameters drive the coder, both kept in fixed
//! point with four fractional bits: `k_rp` selects zero-run mode
//! (`k_rp >= 16`) and the run block length `2^(k_rp >> 4)`, `k_p` is the
//! Golomb-Rice parameter `k_p >> 4`.
//!
//! Per symbol `u` (zigzag-mapped):
//! - no-run mode: `GR(u)`; `k_rp += 3` if `u == 0`, else `k_rp -= 1`.
//! - run mode: a complete run of `2^kr` zeros is a single `0` bit and
//!   `k_rp += 2`; a shorter run ended by a nonzero symbol is `1`, the run
//!   length in `kr` bits, then `GR(u - 1)`, and `k_rp -= 1`. A run still
//!   open at the end of the input is flushed as `1` plus its length.
//! - after every Golomb-Rice codeword with quotient `p`: `k_p -= 2` if
//!   `p == 0`, `k_p += min(p, 32)` if `p > 1`.
//!
//! Quotients of 32 or more are escaped as 32 one bits, six bits holding the
//! bit length of the value minus one, then the value itself.

use super::bitio::{BitReader, BitWriter};
use crate::error::{Error, Result};

pub const SCALE_BITS: u32 = 4;
pub const PARAM_MAX: u32 = 16 * 24;
pub const U0: u32 = 3;
pub const D0: u32 = 1;
pub const U1: u32 = 2;
pub const D1: u32 = 1;
const ESCAPE: u64 = 32;
const INITIAL_K_RP: u32 = 16;
const INITIAL_K_P: u32 = 16;

#[inline]
pub fn zigzag(x: i64) -> u64 {
    ((x << 1) ^ (x >> 63)) as u64
}

#[inline]
pub fn unzigzag(u: u64) -> i64 {
    ((u >> 1) as i64) ^ -((u & 1) as i64)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Run,
    NoRun,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RlgrState {
    pub k_rp: u32,
    pub k_p: u32,
}

impl Default for RlgrState {
    fn default() -> Self {
        Self {
            k_rp: INITIAL_K_RP,
            k_p: INITIAL_K_P,
        }
    }
}

impl RlgrState {
    pub fn mode(&self) -> Mode {
        if self.k_rp >= 1 << SCALE_BITS {
            Mode::Run
        } else {
            Mode::NoRun
        }
    }

    #[inline]
    pub fn run_bits(&self) -> u32 {
        self.k_rp >> SCALE_BITS
    }

    #[inline]
    pub fn rice_bits(&self) -> u32 {
        self.k_p >> SCALE_BITS
    }

    fn up_rp(&mut self, by: u32) {
        self.k_rp = (self.k_rp + by).min(PARAM_MAX);
    }

    fn down_rp(&mut self, by: u32) {
        self.k_rp = self.k_rp.saturating_sub(by);
    }

    fn adapt_rice(&mut self, quotient: u64) {
        if quotient == 0 {
            self.k_p = self.k_p.saturating_sub(2);
        } else if quotient > 1 {
            self.k_p = (self.k_p + quotient.min(ESCAPE) as u32).min(PARAM_MAX);
        }
    }
}

fn write_gr(w: &mut BitWriter, state: &mut RlgrState, u: u64) {
    let k = state.rice_bits();
    let p = u >> k;
    if p < ESCAPE {
        w.write_ones(p);
        w.write_bit(false);
        w.write_bits(u, k);
    } else {
        let nbits = 64 - u.leading_zeros();
        w.write_ones(ESCAPE);
        w.write_bits((nbits - 1) as u64, 6);
        w.write_bits(u, nbits);
    }
    state.adapt_rice(p);
}

fn read_gr(r: &mut BitReader, state: &mut RlgrState) -> Result<u64> {
    let k = state.rice_bits();
    let p = r.read_unary(ESCAPE)?;
    let u = if p < ESCAPE {
        (p << k) | r.read_bits(k)?
    } else {
        let nbits = r.read_bits(6)? as u32 + 1;
        r.read_bits(nbits)?
    };
    state.adapt_rice(u >> k);
    Ok(u)
}

pub fn rlgr_encode(symbols: &[i64]) -> Vec<u8> {
    let mut w = BitWriter::new();
    let mut state = RlgrState::default();
    let mut run = 0u64;
    for &x in symbols {
        let u = zigzag(x);
        match state.mode() {
            Mode::Run => {
                let kr = state.run_bits();
                if u == 0 {
                    run += 1;
                    if run == 1 << kr {
                        w.write_bit(false);
                        state.up_rp(U1);
                        run = 0;
                    }
                } else {
                    w.write_bit(true);
                    w.write_bits(run, kr);
                    write_gr(&mut w, &mut state, u - 1);
                    state.down_rp(D1);
                    run = 0;
                }
            }
            Mode::NoRun => {
                write_gr(&mut w, &mut state, u);
                if u == 0 {
                    state.up_rp(U0);
                } else {
                    state.down_rp(D0);
                }
            }
        }
    }
    if run > 0 {
        w.write_bit(true);
        w.write_bits(run, state.run_bits());
    }
    w.finish()
}

pub fn rlgr_decode(bytes: &[u8], count: usize) -> Result<Vec<i64>> {
    let mut r = BitReader::new(bytes);
    let mut state = RlgrState::default();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let remaining = (count - out.len()) as u64;
        match state.mode() {
            Mode::Run => {
                let kr = state.run_bits();
                if !r.read_bit()? {
                    let full = 1u64 << kr;
                    if full > remaining {
                        return Err(Error::Corrupt(format!(
                            "zero run of {full} exceeds {remaining} remaining symbols"
                        )));
                    }
                    out.resize(out.len() + full as usize, 0);
                    state.up_rp(U1);
                } else {
                    let run = r.read_bits(kr)?;
                    if run > remaining {
                        return Err(Error::Corrupt(format!(
                            "zero run of {run} exceeds {remaining} remaining symbols"
                        )));
                    }
                    out.resize(out.len() + run as usize, 0);
                    if run == remaining {
                        break;
                    }
                    let u = read_gr(&mut r, &mut state)?
                        .checked_add(1)
                        .ok_or_else(|| Error::Corrupt("symbol overflow".into()))?;
                    out.push(unzigzag(u));
                    state.down_rp(D1);
                }
            }
            Mode::NoRun => {
                let u = read_gr(&mut r, &mut state)?;
                out.push(unzigzag(u));
                if u == 0 {
                    state.up_rp(U0);
                } else {
                    state.down_rp(D0);
                }
            }
        }
    }
    r.finish()?;
    Ok(out)
}
