//! Baseline entropy coder: a static binary order-0 range coder.
//!
//! 32-bit range, byte-wise renormalization with explicit carry propagation.
//! The model is the block's own ones count: every bit of a length-m block is
//! coded with P(0) = (m - k) / m, so the coder gets exactly the information
//! the quantized-indexing coder gets from its class tag. Each block is an
//! independent stream flushed to 5 bytes (the first emitted byte is a
//! constant the decoder skips).

use thiserror::Error;

const TOP: u32 = 1 << 24;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AcError {
    #[error("payload too short for range decoder")]
    Truncated,
}

struct RangeEncoder {
    low: u64,
    range: u32,
    cache: u8,
    cache_size: u64,
    out: Vec<u8>,
}

impl RangeEncoder {
    fn new() -> Self {
        RangeEncoder { low: 0, range: u32::MAX, cache: 0, cache_size: 1, out: Vec::new() }
    }

    fn shift_low(&mut self) {
        if self.low < 0xFF00_0000 || self.low > 0xFFFF_FFFF {
            let carry = (self.low >> 32) as u8;
            self.out.push(self.cache.wrapping_add(carry));
            for _ in 1..self.cache_size {
                self.out.push(0xFFu8.wrapping_add(carry));
            }
            self.cache = (self.low >> 24) as u8;
            self.cache_size = 0;
        }
        self.cache_size += 1;
        self.low = (self.low << 8) & 0xFFFF_FFFF;
    }

    fn encode_bit(&mut self, zero_freq: u32, total: u32, bit: u8) {
        let bound = self.range / total * zero_freq;
        if bit == 0 {
            debug_assert!(bound > 0, "coding a zero-probability symbol");
            self.range = bound;
        } else {
            self.low += bound as u64;
            self.range -= bound;
        }
        while self.range < TOP {
            self.range <<= 8;
            self.shift_low();
        }
    }

    fn finish(mut self) -> Vec<u8> {
        for _ in 0..5 {
            self.shift_low();
        }
        self.out
    }
}

struct RangeDecoder<'a> {
    code: u32,
    range: u32,
    input: &'a [u8],
    pos: usize,
}

impl<'a> RangeDecoder<'a> {
    fn new(input: &'a [u8]) -> Result<Self, AcError> {
        if input.len() < 5 {
            return Err(AcError::Truncated);
        }
        let mut d = RangeDecoder { code: 0, range: u32::MAX, input, pos: 0 };
        for _ in 0..5 {
            d.code = d.code << 8 | d.next_byte() as u32;
        }
        Ok(d)
    }

    fn next_byte(&mut self) -> u8 {
        let b = self.input.get(self.pos).copied().unwrap_or(0);
        self.pos += 1;
        b
    }

    fn decode_bit(&mut self, zero_freq: u32, total: u32) -> u8 {
        let bound = self.range / total * zero_freq;
        let bit = if self.code < bound {
            self.range = bound;
            0
        } else {
            self.code -= bound;
            self.range -= bound;
            1
        };
        while self.range < TOP {
            self.range <<= 8;
            self.code = self.code << 8 | self.next_byte() as u32;
        }
        bit
    }
}

/// Encodes one block of bits under the static model P(0) = (m - k) / m.
pub fn ac_encode(bits: &[u8], k: usize) -> Vec<u8> {
    let m = bits.len();
    if m == 0 {
        return Vec::new();
    }
    debug_assert_eq!(k, bits.iter().filter(|&&b| b != 0).count());
    let zero_freq = (m - k) as u32;
    let total = m as u32;
    let mut enc = RangeEncoder::new();
    for &b in bits {
        enc.encode_bit(zero_freq, total, b);
    }
    enc.finish()
}

/// Decodes a block encoded by [`ac_encode`] with the same (m, k).
pub fn ac_decode(payload: &[u8], m: usize, k: usize) -> Result<Vec<u8>, AcError> {
    if m == 0 {
        return Ok(Vec::new());
    }
    let zero_freq = (m - k) as u32;
    let total = m as u32;
    let mut dec = RangeDecoder::new(payload)?;
    Ok((0..m).map(|_| dec.decode_bit(zero_freq, total)).collect())
}
