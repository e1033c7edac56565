//! Sliding-window integers: exact `w * 2^s` arithmetic with a g-bit mantissa.
//!
//! A sliding-window integer (SWI) represents the non-negative integer
//! `w * 2^s` where the mantissa `w` carries at most `g` significant bits and
//! `s` counts trailing zero bits. Unlike floating point, SWI arithmetic is
//! integer-exact: a sum or product of SWI operands is accumulated at full
//! precision and rounded *once*, at the end, with the ceiling operator
//! [`sw_ceil`]. That single deferred rounding is what makes quantized count
//! tables decodable — the rounded value is the smallest representable integer
//! that still majorizes the exact one.
//!
//! Normalization: whenever `s > 0` the top mantissa bit is set
//! (`2^(g-1) <= w < 2^g`). Values that fit `g` bits outright, including 0 and
//! 1, are stored denormalized with `s = 0`. The precision `g` is a property
//! of the surrounding table or stream, not of the value, so it is passed to
//! the operators rather than stored per value.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

/// Smallest supported mantissa width.
pub const MIN_PRECISION: u32 = 4;
/// Largest supported mantissa width.
pub const MAX_PRECISION: u32 = 32;

/// A sliding-window integer `w * 2^s`.
///
/// Immutable; all operations are pure functions, so values can be shared
/// freely across threads.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct SwInt {
    w: u64,
    s: u64,
}

impl SwInt {
    /// The zero count (unreachable lattice point).
    pub const ZERO: SwInt = SwInt { w: 0, s: 0 };
    /// The unit count (single path).
    pub const ONE: SwInt = SwInt { w: 1, s: 0 };

    /// Builds a value from raw parts, renormalizing so that the invariant
    /// `s > 0 => top mantissa bit set` holds. `w` must fit `g` bits.
    pub fn from_parts(w: u64, s: u64, g: u32) -> SwInt {
        debug_assert!((MIN_PRECISION..=MAX_PRECISION).contains(&g));
        debug_assert!(w < (1u64 << g), "mantissa exceeds {g} bits");
        normalize(w, s, g)
    }

    /// Mantissa (`g` significant bits).
    pub fn mantissa(&self) -> u64 {
        self.w
    }

    /// Shift: number of trailing zero bits below the mantissa.
    pub fn shift(&self) -> u64 {
        self.s
    }

    pub fn is_zero(&self) -> bool {
        self.w == 0
    }

    /// The represented integer, `w * 2^s`, at full precision.
    pub fn value(&self) -> BigUint {
        BigUint::from(self.w) << self.s
    }

    /// The represented integer if it fits 128 bits.
    pub fn value_u128(&self) -> Option<u128> {
        if self.w == 0 {
            return Some(0);
        }
        if self.bit_len() > 128 {
            return None;
        }
        Some((self.w as u128) << self.s)
    }

    /// Number of bits in the represented integer (0 for zero).
    pub fn bit_len(&self) -> u64 {
        if self.w == 0 {
            0
        } else {
            (64 - self.w.leading_zeros()) as u64 + self.s
        }
    }

    /// Compares the represented value against an arbitrary integer.
    pub fn cmp_value(&self, other: &BigUint) -> std::cmp::Ordering {
        self.value().cmp(other)
    }
}

fn normalize(mut w: u64, mut s: u64, g: u32) -> SwInt {
    if w == 0 {
        return SwInt::ZERO;
    }
    // Left-justify the mantissa within its g-bit window (or until s hits 0).
    while s > 0 && w >> (g - 1) == 0 {
        w <<= 1;
        s -= 1;
    }
    SwInt { w, s }
}

/// SW ceiling of a 128-bit integer: the smallest SWI with a g-bit mantissa
/// whose value is `>= x`. Exact whenever `x` fits `g` bits.
pub fn sw_ceil_u128(x: u128, g: u32) -> SwInt {
    debug_assert!((MIN_PRECISION..=MAX_PRECISION).contains(&g));
    if x == 0 {
        return SwInt::ZERO;
    }
    let bits = 128 - x.leading_zeros();
    if bits <= g {
        return SwInt { w: x as u64, s: 0 };
    }
    let sh = (bits - g) as u64;
    let mut w = (x >> sh) as u64;
    let mut s = sh;
    if x & ((1u128 << sh) - 1) != 0 {
        w += 1;
        if w == 1u64 << g {
            // Mantissa overflowed its window; slide the window up one bit.
            w = 1u64 << (g - 1);
            s += 1;
        }
    }
    SwInt { w, s }
}

/// SW ceiling of an arbitrary-precision integer.
pub fn sw_ceil(x: &BigUint, g: u32) -> SwInt {
    debug_assert!((MIN_PRECISION..=MAX_PRECISION).contains(&g));
    if x.is_zero() {
        return SwInt::ZERO;
    }
    let bits = x.bits();
    if bits <= g as u64 {
        return SwInt { w: x.to_u64().unwrap(), s: 0 };
    }
    let sh = bits - g as u64;
    let mut w = (x >> sh).to_u64().unwrap();
    let mut s = sh;
    // Round up if any of the sh discarded low bits is set.
    if x.trailing_zeros().unwrap_or(0) < sh {
        w += 1;
        if w == 1u64 << g {
            w = 1u64 << (g - 1);
            s += 1;
        }
    }
    SwInt { w, s }
}

/// SW ceiling of a sum: the terms are accumulated exactly — no intermediate
/// rounding — and rounded once at the end. This is the delayed-rounding rule
/// that distinguishes SWI from floating point: the result equals
/// `sw_ceil(sum of exact values)` for every input.
///
/// The accumulation runs in a 128-bit window when the terms' spread allows
/// (always the case for table recurrences, where adjacent counts are within a
/// factor of the front index) and falls back to big-integer arithmetic
/// otherwise, so exactness never depends on the operand layout.
pub fn sw_sum_ceil(terms: &[SwInt], g: u32) -> SwInt {
    debug_assert!((MIN_PRECISION..=MAX_PRECISION).contains(&g));
    let mut min_s = u64::MAX;
    let mut max_top = 0u64;
    let mut nonzero = 0u64;
    for t in terms {
        if t.w == 0 {
            continue;
        }
        nonzero += 1;
        min_s = min_s.min(t.s);
        max_top = max_top.max(t.bit_len());
    }
    if nonzero == 0 {
        return SwInt::ZERO;
    }
    // Headroom: span bits for the largest term plus log2(#terms) carry bits.
    let carry_bits = 64 - (nonzero - 1).leading_zeros() as u64;
    if max_top - min_s + carry_bits <= 127 {
        let mut acc: u128 = 0;
        for t in terms {
            if t.w != 0 {
                acc += (t.w as u128) << (t.s - min_s);
            }
        }
        let q = sw_ceil_u128(acc, g);
        return normalize(q.w, q.s + min_s, g);
    }
    let mut acc = BigUint::zero();
    for t in terms {
        if t.w != 0 {
            acc += t.value();
        }
    }
    sw_ceil(&acc, g)
}

/// SW ceiling of a product `r * q`: the product is computed exactly before
/// the single rounding.
pub fn sw_mul_ceil(r: u64, q: SwInt, g: u32) -> SwInt {
    debug_assert!((MIN_PRECISION..=MAX_PRECISION).contains(&g));
    debug_assert!(q.w < (1u64 << g));
    if r == 0 || q.w == 0 {
        return SwInt::ZERO;
    }
    let prod = (r as u128) * (q.w as u128);
    let c = sw_ceil_u128(prod, g);
    normalize(c.w, c.s + q.s, g)
}
