//! Quantized mixed-radix and permutation codes.
//!
//! High-entropy-limit codes need only a linear table: the quantized interval
//! lengths grow by one ceiling-rounded multiplication per position,
//! `L_i = ceil_sw(R_i * L_(i-1))`, so `L_i` always covers the full digit box
//! below it and digits decode by plain division. Permutations are the special
//! case `R_i = i` with Lehmer digits. These codes also carry the per-block
//! tip digits for the stream container.

use num_bigint::BigUint;
use num_traits::Zero;
use thiserror::Error;

use crate::swi::{sw_mul_ceil, SwInt, MAX_PRECISION, MIN_PRECISION};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RadixError {
    #[error("radix at position {0} is zero")]
    ZeroRadix(usize),
    #[error("precision {0} outside supported range")]
    BadPrecision(u32),
    #[error("digit {digit} at position {pos} exceeds radix {radix}")]
    DigitOutOfRange { pos: usize, digit: u64, radix: u64 },
    #[error("expected {want} digits, got {got}")]
    LengthMismatch { want: usize, got: usize },
    #[error("index decodes outside the digit box (corrupt stream)")]
    CorruptStream,
    #[error("input is not a permutation of 0..{0}")]
    InvalidPermutation(usize),
}

/// Quantized lengths for digits `d_i < R_i`: `lengths[i]` bounds the index of
/// any i-digit prefix, with `lengths[0] = 1`.
pub struct RadixTable {
    g: u32,
    radices: Vec<u64>,
    lengths: Vec<SwInt>,
}

impl RadixTable {
    pub fn new(radices: Vec<u64>, g: u32) -> Result<Self, RadixError> {
        if !(MIN_PRECISION..=MAX_PRECISION).contains(&g) {
            return Err(RadixError::BadPrecision(g));
        }
        let mut lengths = Vec::with_capacity(radices.len() + 1);
        lengths.push(SwInt::ONE);
        for (i, &r) in radices.iter().enumerate() {
            if r == 0 {
                return Err(RadixError::ZeroRadix(i));
            }
            let next = sw_mul_ceil(r, lengths[i], g);
            lengths.push(next);
        }
        Ok(RadixTable { g, radices, lengths })
    }

    pub fn g(&self) -> u32 {
        self.g
    }

    pub fn digit_count(&self) -> usize {
        self.radices.len()
    }

    pub fn radices(&self) -> &[u64] {
        &self.radices
    }

    /// Interval length after digit `i` (i = 0 is the empty prefix).
    pub fn length(&self, i: usize) -> SwInt {
        self.lengths[i]
    }

    /// Total interval length: every encoded index is below this.
    pub fn total(&self) -> SwInt {
        self.lengths[self.radices.len()]
    }
}

/// Packs digits (least significant first) into a single integer:
/// `sum of d_i * length(i-1)`. The result is below `total()`.
pub fn radix_encode(digits: &[u64], table: &RadixTable) -> Result<BigUint, RadixError> {
    if digits.len() != table.digit_count() {
        return Err(RadixError::LengthMismatch { want: table.digit_count(), got: digits.len() });
    }
    let mut index = BigUint::zero();
    for (i, &d) in digits.iter().enumerate() {
        let radix = table.radices[i];
        if d >= radix {
            return Err(RadixError::DigitOutOfRange { pos: i, digit: d, radix });
        }
        if d != 0 {
            index += table.lengths[i].value() * d;
        }
    }
    Ok(index)
}

/// Recovers digits most significant first by dividing out the quantized
/// lengths. Corrupt input can land in a quantization gap (a value below
/// `total()` that no digit string produces); that surfaces as a recovered
/// digit at or above its radix.
pub fn radix_decode(index: &BigUint, table: &RadixTable) -> Result<Vec<u64>, RadixError> {
    if *index >= table.total().value() {
        return Err(RadixError::CorruptStream);
    }
    let n = table.digit_count();
    let mut digits = vec![0u64; n];
    let mut rest = index.clone();
    for i in (0..n).rev() {
        let weight = table.lengths[i].value();
        let d = &rest / &weight;
        let d = match num_traits::ToPrimitive::to_u64(&d) {
            Some(v) => v,
            None => return Err(RadixError::CorruptStream),
        };
        if d >= table.radices[i] {
            return Err(RadixError::CorruptStream);
        }
        rest -= weight * d;
        digits[i] = d;
    }
    debug_assert!(rest.is_zero());
    Ok(digits)
}

/// Quantized factorial lengths for permutation ranking:
/// `lengths[i] = ceil_sw(i * lengths[i-1])`, so `lengths[n]` covers `n!`.
pub struct PermTable {
    n: usize,
    lengths: Vec<SwInt>,
}

impl PermTable {
    pub fn new(n: usize, g: u32) -> Result<Self, RadixError> {
        if !(MIN_PRECISION..=MAX_PRECISION).contains(&g) {
            return Err(RadixError::BadPrecision(g));
        }
        let mut lengths = Vec::with_capacity(n + 1);
        lengths.push(SwInt::ONE);
        for i in 1..=n {
            lengths.push(sw_mul_ceil(i as u64, lengths[i - 1], g));
        }
        Ok(PermTable { n, lengths })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn total(&self) -> SwInt {
        self.lengths[self.n]
    }
}

/// Ranks a permutation of `0..n` by its left-inversion counts: position `i`
/// contributes (number of earlier elements greater than `perm[i]`) times
/// `lengths[i]`. With a wide enough mantissa this is the factorial number
/// system rank.
pub fn perm_rank(perm: &[usize], table: &PermTable) -> Result<BigUint, RadixError> {
    let n = perm.len();
    if n != table.n {
        return Err(RadixError::LengthMismatch { want: table.n, got: n });
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || seen[p] {
            return Err(RadixError::InvalidPermutation(n));
        }
        seen[p] = true;
    }
    let mut rank = BigUint::zero();
    for i in 1..n {
        let inversions = perm[..i].iter().filter(|&&e| e > perm[i]).count() as u64;
        if inversions != 0 {
            rank += table.lengths[i].value() * inversions;
        }
    }
    Ok(rank)
}

/// Inverse of [`perm_rank`].
pub fn perm_unrank(index: &BigUint, n: usize, table: &PermTable) -> Result<Vec<usize>, RadixError> {
    if n != table.n {
        return Err(RadixError::LengthMismatch { want: table.n, got: n });
    }
    if *index >= table.total().value() {
        return Err(RadixError::CorruptStream);
    }
    // Recover left-inversion counts most significant first.
    let mut counts = vec![0u64; n];
    let mut rest = index.clone();
    for i in (1..n).rev() {
        let weight = table.lengths[i].value();
        let c = &rest / &weight;
        let c = num_traits::ToPrimitive::to_u64(&c).ok_or(RadixError::CorruptStream)?;
        if c > i as u64 {
            return Err(RadixError::CorruptStream);
        }
        rest -= weight * c;
        counts[i] = c;
    }
    if !rest.is_zero() {
        return Err(RadixError::CorruptStream);
    }
    // Rebuild right to left: position i takes the candidate with exactly
    // counts[i] remaining candidates above it.
    let mut pool: Vec<usize> = (0..n).collect();
    let mut perm = vec![0usize; n];
    for i in (0..n).rev() {
        let c = counts[i] as usize;
        if c >= pool.len() {
            return Err(RadixError::CorruptStream);
        }
        let pick = pool.len() - 1 - c;
        perm[i] = pool.remove(pick);
    }
    Ok(perm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::log2_big;
    use num_traits::One;

    #[test]
    fn encode_known_values() {
        let t = RadixTable::new(vec![2, 3, 5], 5).unwrap();
        assert_eq!(
            t.lengths.iter().map(|l| l.value()).collect::<Vec<_>>(),
            [1u32, 2, 6, 30].map(BigUint::from)
        );
        assert_eq!(radix_encode(&[1, 2, 4], &t).unwrap(), BigUint::from(29u32));
        assert_eq!(radix_encode(&[0, 0, 0], &t).unwrap(), BigUint::zero());
        assert_eq!(radix_encode(&[0, 0, 1], &t).unwrap(), BigUint::from(6u32));
        assert_eq!(radix_decode(&BigUint::from(29u32), &t).unwrap(), vec![1, 2, 4]);
        assert_eq!(radix_decode(&BigUint::zero(), &t).unwrap(), vec![0, 0, 0]);
    }

    #[test]
    fn digit_bounds_checked() {
        let t = RadixTable::new(vec![2, 3, 5], 8).unwrap();
        assert!(matches!(
            radix_encode(&[2, 0, 0], &t),
            Err(RadixError::DigitOutOfRange { pos: 0, .. })
        ));
        assert!(matches!(radix_encode(&[0, 0], &t), Err(RadixError::LengthMismatch { .. })));
        assert!(matches!(RadixTable::new(vec![2, 0], 8), Err(RadixError::ZeroRadix(1))));
    }

    #[test]
    fn quantization_gap_is_detected() {
        // 3 * 5 * 7 = 105 but the g=4 lengths grow to 112; the top of the
        // interval is a gap no digit string reaches.
        let t = RadixTable::new(vec![3, 5, 7], 4).unwrap();
        assert_eq!(t.total().value(), BigUint::from(112u32));
        let gap = t.total().value() - BigUint::one();
        assert_eq!(radix_decode(&gap, &t), Err(RadixError::CorruptStream));
        assert_eq!(radix_decode(&t.total().value(), &t), Err(RadixError::CorruptStream));
    }

    #[test]
    fn box_roundtrip_exhaustive_small() {
        for g in [4, 6, 8] {
            let radices = vec![3u64, 4, 5, 2];
            let t = RadixTable::new(radices.clone(), g).unwrap();
            let mut seen = std::collections::HashSet::new();
            let total: u64 = radices.iter().product();
            for mut v in 0..total {
                let digits: Vec<u64> = radices
                    .iter()
                    .map(|&r| {
                        let d = v % r;
                        v /= r;
                        d
                    })
                    .collect();
                let idx = radix_encode(&digits, &t).unwrap();
                assert!(idx < t.total().value());
                assert!(seen.insert(idx.clone()), "collision at g={g}");
                assert_eq!(radix_decode(&idx, &t).unwrap(), digits);
            }
        }
    }

    #[test]
    fn exact_regime_is_classical_mixed_radix() {
        // Product fits the mantissa: the code is the plain positional value.
        let radices = vec![7u64, 11, 13];
        let t = RadixTable::new(radices.clone(), 16).unwrap();
        let digits = [5u64, 10, 12];
        let expect = 5 + 10 * 7 + 12 * 7 * 11;
        assert_eq!(radix_encode(&digits, &t).unwrap(), BigUint::from(expect as u64));
    }

    #[test]
    fn total_majorizes_product_within_bound() {
        for g in [4, 6, 8, 16] {
            let radices = vec![3u64, 5, 7, 11, 13, 17];
            let t = RadixTable::new(radices.clone(), g).unwrap();
            let product: u64 = radices.iter().product();
            assert!(t.total().value() >= BigUint::from(product));
            let excess = log2_big(&t.total().value()) - (product as f64).log2();
            let bound = radices.len() as f64 * std::f64::consts::LOG2_E
                / 2f64.powi(g as i32 - 1);
            assert!(excess <= bound, "excess {excess} over bound {bound} at g={g}");
        }
    }

    fn factorial(n: u64) -> BigUint {
        (1..=n).map(BigUint::from).product::<BigUint>().max(BigUint::one())
    }

    #[test]
    fn perm_known_ranks() {
        let t = PermTable::new(3, 8).unwrap();
        assert_eq!(perm_rank(&[0, 1, 2], &t).unwrap(), BigUint::zero());
        assert_eq!(perm_rank(&[2, 1, 0], &t).unwrap(), BigUint::from(5u32));
        // All six permutations hit distinct ranks, bijective onto 0..6.
        let mut ranks = std::collections::HashSet::new();
        for p in [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
            let r = perm_rank(&p, &t).unwrap();
            assert!(r < BigUint::from(6u32));
            assert!(ranks.insert(r.clone()));
            assert_eq!(perm_unrank(&r, 3, &t).unwrap(), p.to_vec());
        }
    }

    #[test]
    fn perm_table_covers_factorials() {
        for g in [4, 8, 32] {
            let t = PermTable::new(10, g).unwrap();
            assert!(t.total().value() >= factorial(10));
        }
    }

    #[test]
    fn perm_roundtrip_exhaustive_n6() {
        // Exact regime at g=16 must agree with the factorial-system rank.
        let t = PermTable::new(6, 16).unwrap();
        let mut perm: Vec<usize> = (0..6).collect();
        loop {
            let r = perm_rank(&perm, &t).unwrap();
            let mut lehmer = BigUint::zero();
            for i in 1..6 {
                let c = perm[..i].iter().filter(|&&e| e > perm[i]).count() as u64;
                lehmer += factorial(i as u64) * c;
            }
            assert_eq!(r, lehmer);
            assert_eq!(perm_unrank(&r, 6, &t).unwrap(), perm);
            // next_permutation
            let n = perm.len();
            let Some(i) = (0..n - 1).rev().find(|&i| perm[i] < perm[i + 1]) else { break };
            let j = (i + 1..n).rev().find(|&j| perm[j] > perm[i]).unwrap();
            perm.swap(i, j);
            perm[i + 1..].reverse();
        }
    }

    #[test]
    fn perm_rejects_invalid_input() {
        let t = PermTable::new(4, 8).unwrap();
        assert!(matches!(perm_rank(&[0, 1, 1, 2], &t), Err(RadixError::InvalidPermutation(4))));
        assert!(matches!(perm_rank(&[0, 1, 2], &t), Err(RadixError::LengthMismatch { .. })));
        let over = t.total().value();
        assert_eq!(perm_unrank(&over, 4, &t), Err(RadixError::CorruptStream));
    }
}
