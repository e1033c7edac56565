//! Exact enumerative coding at unlimited precision.
//!
//! Ground truth for everything the quantized coder does: big-integer
//! binomials, colex ranking/unranking of fixed-count binary strings, and
//! multinomials. Favors simplicity over speed — this module is verification
//! infrastructure, not part of the coding fast path.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("rank {0} out of range for class ({1}, {2})")]
    RankOutOfRange(BigUint, usize, usize),
}

/// Exact binomial coefficient C(n, k) by the multiplicative formula.
///
/// Returns 0 when `k > n`, matching the path count of an unreachable lattice
/// point.
pub fn binom(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 1..=k {
        acc = acc * (n - k + i) / i;
    }
    acc
}

/// Pascal-triangle memoization of C(n, k) for all `n <= max_n`.
///
/// Built once up front and read-only afterwards, so it can be shared across
/// threads without synchronization.
pub struct BinomialTable {
    max_n: usize,
    rows: Vec<BigUint>,
}

impl BinomialTable {
    pub fn new(max_n: usize) -> Self {
        let mut rows = Vec::with_capacity((max_n + 1) * (max_n + 2) / 2);
        for n in 0..=max_n {
            for k in 0..=n {
                if k == 0 || k == n {
                    rows.push(BigUint::one());
                } else {
                    let prev = n * (n - 1) / 2;
                    let v = &rows[prev + k - 1] + &rows[prev + k];
                    rows.push(v);
                }
            }
        }
        BinomialTable { max_n, rows }
    }

    pub fn max_n(&self) -> usize {
        self.max_n
    }

    /// C(n, k); falls back to direct evaluation beyond the memoized range.
    pub fn get(&self, n: usize, k: usize) -> BigUint {
        if k > n {
            return BigUint::zero();
        }
        if n <= self.max_n {
            self.rows[n * (n + 1) / 2 + k].clone()
        } else {
            binom(n as u64, k as u64)
        }
    }
}

/// Exact multinomial coefficient `(sum counts)! / prod(counts[i]!)`,
/// evaluated as a product of binomials over the prefix sums.
pub fn multinomial(counts: &[u64]) -> BigUint {
    let mut acc = BigUint::one();
    let mut total = 0u64;
    for &c in counts {
        total += c;
        acc *= binom(total, c);
    }
    acc
}

/// Colex rank of a binary string among all strings with the same length and
/// ones count: the j-th one (1-based) at 0-based offset `p` contributes
/// C(p, j). Each nonzero bit's addend depends only on the prefix processed so
/// far, so ranking is a single forward pass.
pub fn rank_exact(bits: &[u8]) -> BigUint {
    let mut rank = BigUint::zero();
    let mut ones = 0u64;
    for (pos, &b) in bits.iter().enumerate() {
        if b != 0 {
            ones += 1;
            rank += binom(pos as u64, ones);
        }
    }
    rank
}

/// Inverse of [`rank_exact`]: the unique length-`n`, `k`-ones string with the
/// given rank. Walks the path backwards from the class endpoint, at each step
/// picking the subinterval (low: last bit 0, high: last bit 1) containing the
/// remaining index.
pub fn unrank_exact(index: &BigUint, n: usize, k: usize) -> Result<Vec<u8>, OracleError> {
    if *index >= binom(n as u64, k as u64) {
        return Err(OracleError::RankOutOfRange(index.clone(), n, k));
    }
    let mut x = n - k;
    let mut y = k;
    let mut rest = index.clone();
    let mut out = vec![0u8; n];
    for slot in (0..n).rev() {
        let low = if x >= 1 {
            binom((x - 1 + y) as u64, y as u64)
        } else {
            BigUint::zero()
        };
        if rest >= low {
            out[slot] = 1;
            rest -= low;
            y -= 1;
        } else {
            x -= 1;
        }
    }
    debug_assert!(rest.is_zero());
    Ok(out)
}

/// log2 of a positive big integer, accurate to f64 precision.
pub fn log2_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    assert!(bits > 0, "log2 of zero");
    if bits <= 64 {
        (x.to_u64().unwrap() as f64).log2()
    } else {
        let top = (x >> (bits - 64)).to_u64().unwrap();
        (top as f64).log2() + (bits - 64) as f64
    }
}
