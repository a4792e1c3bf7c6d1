//! MSB-first bit packing.

use crate::error::{Error, Result};

#[derive(Default)]
pub struct BitWriter {
    bytes: Vec<u8>,
    acc: u64,
    filled: u32,
}

impl BitWriter {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends the low `n` bits of `value`, most significant first.
    pub fn write_bits(&mut self, value: u64, n: u32) {
        debug_assert!(n <= 64);
        if n == 0 {
            return;
        }
        if n > 32 {
            self.write_bits(value >> 32, n - 32);
            self.write_bits(value & 0xffff_ffff, 32);
            return;
        }
        let v = value & ((1u64 << n) - 1);
        self.acc = (self.acc << n) | v;
        self.filled += n;
        while self.filled >= 8 {
            self.filled -= 8;
            self.bytes.push((self.acc >> self.filled) as u8);
        }
        self.acc &= (1u64 << self.filled) - 1;
    }

    #[inline]
    pub fn write_bit(&mut self, bit: bool) {
        self.write_bits(bit as u64, 1);
    }

    pub fn write_ones(&mut self, mut n: u64) {
        while n >= 32 {
            self.write_bits(0xffff_ffff, 32);
            n -= 32;
        }
        self.write_bits((1u64 << n) - 1, n as u32);
    }

    /// Pads with zero bits to a byte boundary.
    pub fn finish(mut self) -> Vec<u8> {
        if self.filled > 0 {
            let pad = 8 - self.filled;
            self.write_bits(0, pad);
        }
        self.bytes
    }
}

pub struct BitReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> BitReader<'a> {
    pub fn new(bytes: &'a [u8]) -> Self {
        Self { bytes, pos: 0 }
    }

    #[inline]
    pub fn read_bit(&mut self) -> Result<bool> {
        let byte = *self.bytes.get(self.pos >> 3).ok_or(Error::Truncated)?;
        let bit = (byte >> (7 - (self.pos & 7))) & 1;
        self.pos += 1;
        Ok(bit == 1)
    }

    pub fn read_bits(&mut self, n: u32) -> Result<u64> {
        let mut v = 0u64;
        for _ in 0..n {
            v = (v << 1) | self.read_bit()? as u64;
        }
        Ok(v)
    }

    /// Counts leading one bits, consuming the terminating zero. Stops
    /// without consuming anything further once `limit` ones are read.
    pub fn read_unary(&mut self, limit: u64) -> Result<u64> {
        let mut n = 0;
        while n < limit {
            if !self.read_bit()? {
                return Ok(n);
            }
            n += 1;
        }
        Ok(n)
    }

    /// Checks that only zero padding inside the final byte remains.
    pub fn finish(self) -> Result<()> {
        let used = self.pos.div_ceil(8);
        if used != self.bytes.len() {
            return Err(Error::SurplusData);
        }
        if self.pos & 7 != 0 {
            let last = self.bytes[used - 1];
            let mask = (1u8 << (8 - (self.pos & 7))) - 1;
            if last & mask != 0 {
                return Err(Error::SurplusData);
            }
        }
        Ok(())
    }
}
