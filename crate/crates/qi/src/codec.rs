//! Binary block encoder/decoder over a quantized count table.
//!
//! Encoding is colex ranking with quantized addends: scanning the block
//! forward, every 1 bit at path point `(x, y)` adds the table entry at
//! `(x-1, y)` into the index accumulator at that entry's bit offset — one
//! table lookup and one shifted add per 1 bit, nothing at all for 0 bits.
//! Decoding walks the path backwards from the class endpoint, at each point
//! testing which subinterval of the current count holds the index (low
//! subinterval: last bit 0; high: last bit 1, offset by the low count).
//! Encoded this way the index always stays below the class count, and with a
//! high enough precision the index equals the exact colex rank.
//!
//! [`split_tip`]/[`merge_tip`] carve the top 16 bits of an index off as a
//! digit in a radix derived from the class count's leading bits; the
//! container packs those digits into one mixed-radix number so block
//! boundaries cost no bit fractions.

use num_bigint::BigUint;
use thiserror::Error;

use crate::qtable::QuantTable;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CodecError {
    #[error("block of {m} symbols exceeds table front {n_max}")]
    BlockTooLong { m: usize, n_max: usize },
    #[error("index does not identify a valid path in its class")]
    CorruptIndex,
    #[error("tip digit {digit} outside radix {radix}")]
    DigitOutOfRange { digit: u32, radix: u32 },
    #[error("tip body has {got} bits, class requires {want}")]
    BodyLengthMismatch { got: usize, want: usize },
}

/// A growable little-endian bit string holding a non-negative integer, with
/// shifted add/subtract/compare. Carries propagate as far as they need to.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct BitAccumulator {
    limbs: Vec<u64>,
}

impl BitAccumulator {
    pub fn new() -> Self {
        BitAccumulator { limbs: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.limbs.iter().all(|&l| l == 0)
    }

    /// Position of the highest set bit plus one (0 for zero).
    pub fn bit_len(&self) -> u64 {
        for (i, &l) in self.limbs.iter().enumerate().rev() {
            if l != 0 {
                return i as u64 * 64 + (64 - l.leading_zeros()) as u64;
            }
        }
        0
    }

    pub fn bit(&self, pos: u64) -> bool {
        let limb = (pos / 64) as usize;
        limb < self.limbs.len() && self.limbs[limb] >> (pos % 64) & 1 == 1
    }

    fn grow(&mut self, limbs: usize) {
        if self.limbs.len() < limbs {
            self.limbs.resize(limbs, 0);
        }
    }

    /// Adds `w * 2^shift`.
    pub fn add_shifted(&mut self, w: u64, shift: u64) {
        if w == 0 {
            return;
        }
        let limb = (shift / 64) as usize;
        let off = shift % 64;
        let lo = w << off;
        let hi = if off == 0 { 0 } else { w >> (64 - off) };
        self.grow(limb + 2);
        let (sum, mut carry) = self.limbs[limb].overflowing_add(lo);
        self.limbs[limb] = sum;
        let mut i = limb + 1;
        let (sum, c2) = self.limbs[i].overflowing_add(hi);
        let (sum, c3) = sum.overflowing_add(carry as u64);
        self.limbs[i] = sum;
        carry = c2 || c3;
        while carry {
            i += 1;
            self.grow(i + 1);
            let (sum, c) = self.limbs[i].overflowing_add(1);
            self.limbs[i] = sum;
            carry = c;
        }
        while self.limbs.last() == Some(&0) {
            self.limbs.pop();
        }
    }

    /// Compares the held value against `w * 2^shift`.
    pub fn cmp_shifted(&self, w: u64, shift: u64) -> std::cmp::Ordering {
        use std::cmp::Ordering::*;
        if w == 0 {
            return if self.is_zero() { Equal } else { Greater };
        }
        let target_len = shift + (64 - w.leading_zeros()) as u64;
        let my_len = self.bit_len();
        if my_len != target_len {
            return my_len.cmp(&target_len);
        }
        let window = self.window_u64(shift);
        match window.cmp(&w) {
            Equal => {
                if self.any_bit_below(shift) {
                    Greater
                } else {
                    Equal
                }
            }
            other => other,
        }
    }

    /// Subtracts `w * 2^shift`; the value must be at least that large.
    pub fn sub_shifted(&mut self, w: u64, shift: u64) {
        debug_assert!(self.cmp_shifted(w, shift) != std::cmp::Ordering::Less);
        if w == 0 {
            return;
        }
        let limb = (shift / 64) as usize;
        let off = shift % 64;
        let lo = w << off;
        let hi = if off == 0 { 0 } else { w >> (64 - off) };
        let (diff, mut borrow) = self.limbs[limb].overflowing_sub(lo);
        self.limbs[limb] = diff;
        let mut i = limb + 1;
        if hi != 0 || borrow {
            let (diff, b2) = self.limbs[i].overflowing_sub(hi);
            let (diff, b3) = diff.overflowing_sub(borrow as u64);
            self.limbs[i] = diff;
            borrow = b2 || b3;
            while borrow {
                i += 1;
                let (diff, b) = self.limbs[i].overflowing_sub(1);
                self.limbs[i] = diff;
                borrow = b;
            }
        }
        while self.limbs.last() == Some(&0) {
            self.limbs.pop();
        }
    }

    /// Up to 64 bits starting at `shift`, as an integer.
    fn window_u64(&self, shift: u64) -> u64 {
        let limb = (shift / 64) as usize;
        let off = (shift % 64) as u32;
        let lo = self.limbs.get(limb).copied().unwrap_or(0) >> off;
        if off == 0 {
            lo
        } else {
            lo | self.limbs.get(limb + 1).copied().unwrap_or(0) << (64 - off)
        }
    }

    fn any_bit_below(&self, pos: u64) -> bool {
        let limb = (pos / 64) as usize;
        let off = pos % 64;
        self.limbs.iter().take(limb).any(|&l| l != 0)
            || (off > 0
                && self.limbs.get(limb).copied().unwrap_or(0) & ((1u64 << off) - 1) != 0)
    }

    pub fn to_biguint(&self) -> BigUint {
        let digits: Vec<u32> = self
            .limbs
            .iter()
            .flat_map(|&l| [l as u32, (l >> 32) as u32])
            .collect();
        BigUint::new(digits)
    }

    pub fn from_biguint(value: &BigUint) -> Self {
        BitAccumulator { limbs: value.iter_u64_digits().collect() }
    }
}

/// One encoded block: symbol count, ones count, and the block's index within
/// the (m, k) class. The index is always below the class count in the table
/// the block was encoded with.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockCode {
    pub m: usize,
    pub k: usize,
    pub index: BitAccumulator,
}

/// Ranks a block of bits against the table. Each 1 bit costs one table
/// lookup and one shifted add; 0 bits cost nothing.
pub fn encode_block(bits: &[u8], table: &QuantTable) -> Result<BlockCode, CodecError> {
    let m = bits.len();
    if m > table.n_max() {
        return Err(CodecError::BlockTooLong { m, n_max: table.n_max() });
    }
    let mut x = 0usize;
    let mut y = 0usize;
    let mut index = BitAccumulator::new();
    for &b in bits {
        if b != 0 {
            y += 1;
            if x > 0 {
                let addend = table.entry(x - 1 + y, y);
                index.add_shifted(addend.mantissa(), addend.shift());
            }
        } else {
            x += 1;
        }
    }
    Ok(BlockCode { m, k: y, index })
}

/// Reconstructs a block's bits from its code by walking the class interval
/// splits backwards. Fails on any index that no path of the class produces.
pub fn decode_block(code: &BlockCode, table: &QuantTable) -> Result<Vec<u8>, CodecError> {
    let BlockCode { m, k, ref index } = *code;
    if m > table.n_max() {
        return Err(CodecError::BlockTooLong { m, n_max: table.n_max() });
    }
    if k > m {
        return Err(CodecError::CorruptIndex);
    }
    let class = table.class_count(m, k);
    if index.cmp_shifted(class.mantissa(), class.shift()) != std::cmp::Ordering::Less {
        return Err(CodecError::CorruptIndex);
    }
    let mut x = m - k;
    let mut y = k;
    let mut rest = index.clone();
    let mut out = vec![0u8; m];
    for slot in (0..m).rev() {
        debug_assert!({
            let here = table.entry(x + y, y);
            rest.cmp_shifted(here.mantissa(), here.shift()) == std::cmp::Ordering::Less
        });
        let low = if x > 0 { table.entry(x - 1 + y, y) } else { crate::swi::SwInt::ZERO };
        if low.is_zero() || rest.cmp_shifted(low.mantissa(), low.shift()) != std::cmp::Ordering::Less
        {
            if y == 0 {
                return Err(CodecError::CorruptIndex);
            }
            out[slot] = 1;
            rest.sub_shifted(low.mantissa(), low.shift());
            y -= 1;
        } else {
            x -= 1;
        }
    }
    if !rest.is_zero() {
        return Err(CodecError::CorruptIndex);
    }
    Ok(out)
}

/// Splits a block index into (digit, radix, body): the body is the low
/// `bitlen(class) - 16` bits of the index, and the digit is the remaining top
/// part, bounded by the class count's top 16 bits plus one. Classes whose
/// count fits 16 bits degenerate to digit = index, radix = count, empty body.
///
/// The `+ 1` on the radix covers indices just below the class count, whose
/// top 16 bits can equal the count's own top 16 bits — the digit alphabet
/// must include that boundary value to stay decodable over every valid index.
pub fn split_tip(code: &BlockCode, table: &QuantTable) -> (u32, u32, Vec<u8>) {
    let class = table.class_count(code.m, code.k);
    let class_bits = class.bit_len();
    if class_bits <= 16 {
        let digit = code.index.window_u64(0) as u32;
        let radix = class.value_u128().unwrap() as u32;
        debug_assert!(digit < radix);
        return (digit, radix, Vec::new());
    }
    let body_len = class_bits - 16;
    let digit = (code.index.window_u64(body_len) & 0xFFFF) as u32;
    let w = class.mantissa();
    let wb = 64 - w.leading_zeros() as u64;
    let top16 = if wb >= 16 { w >> (wb - 16) } else { w << (16 - wb) };
    let radix = top16 as u32 + 1;
    debug_assert!(digit < radix);
    let body: Vec<u8> = (0..body_len).map(|i| code.index.bit(i) as u8).collect();
    (digit, radix, body)
}

/// Inverse of [`split_tip`]: reassembles the index and validates it against
/// the class.
pub fn merge_tip(
    digit: u32,
    radix: u32,
    body: &[u8],
    m: usize,
    k: usize,
    table: &QuantTable,
) -> Result<BlockCode, CodecError> {
    if m > table.n_max() {
        return Err(CodecError::BlockTooLong { m, n_max: table.n_max() });
    }
    if k > m {
        return Err(CodecError::CorruptIndex);
    }
    if digit >= radix {
        return Err(CodecError::DigitOutOfRange { digit, radix });
    }
    let class = table.class_count(m, k);
    let body_len = class.bit_len().saturating_sub(16) as usize;
    if body.len() != body_len {
        return Err(CodecError::BodyLengthMismatch { got: body.len(), want: body_len });
    }
    let mut index = BitAccumulator::new();
    for (i, &b) in body.iter().enumerate() {
        if b != 0 {
            index.add_shifted(1, i as u64);
        }
    }
    index.add_shifted(digit as u64, body_len as u64);
    if index.cmp_shifted(class.mantissa(), class.shift()) != std::cmp::Ordering::Less {
        return Err(CodecError::CorruptIndex);
    }
    Ok(BlockCode { m, k, index })
}
