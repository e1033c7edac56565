//! Deterministic input generators for the benchmark and test harnesses.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Stable per-cell RNG derivation (splitmix over the components).
pub fn cell_rng(seed: u64, parts: &[u64]) -> ChaCha8Rng {
    let mut h = seed ^ 0x9E37_79B9_7F4A_7C15;
    for &p in parts {
        h ^= p.wrapping_add(0x9E37_79B9_7F4A_7C15).wrapping_add(h << 6).wrapping_add(h >> 2);
        h = h.wrapping_mul(0xBF58_476D_1CE4_E5B9);
        h ^= h >> 27;
    }
    ChaCha8Rng::seed_from_u64(h)
}

/// A bit string of length `n` with exactly `ones` ones at random positions.
pub fn bits_with_ones(n: usize, ones: usize, rng: &mut ChaCha8Rng) -> Vec<u8> {
    assert!(ones <= n);
    let mut bits = vec![0u8; n];
    if ones * 3 > n {
        // Dense: partial shuffle of all positions.
        let mut idx: Vec<u32> = (0..n as u32).collect();
        idx.partial_shuffle(rng, ones);
        for &p in &idx[..ones] {
            bits[p as usize] = 1;
        }
    } else {
        let mut placed = 0;
        while placed < ones {
            let p = rng.random_range(0..n);
            if bits[p] == 0 {
                bits[p] = 1;
                placed += 1;
            }
        }
    }
    bits
}

/// A bit string of independent bits with P(1) = `p`.
pub fn bits_with_density(n: usize, p: f64, rng: &mut ChaCha8Rng) -> Vec<u8> {
    (0..n).map(|_| (rng.random::<f64>() < p) as u8).collect()
}

/// "Vary" input: a ramp of consecutive int32 values (..., -2, -1, 0, +1, ...)
/// centered on zero, serialized little-endian and unpacked to bits. The exact
/// construction is an interpretation; the harness flags it as such.
pub fn vary_bits(n_bits: usize) -> Vec<u8> {
    let count = n_bits / 32;
    let start = -(count as i64 / 2);
    let mut bits = Vec::with_capacity(count * 32);
    for i in 0..count {
        let v = (start + i as i64) as i32;
        for byte in v.to_le_bytes() {
            for bit in 0..8 {
                bits.push(byte >> bit & 1);
            }
        }
    }
    bits
}

/// Unpacks bytes to bits, least significant bit of each byte first.
pub fn bytes_to_bits(data: &[u8]) -> Vec<u8> {
    let mut bits = Vec::with_capacity(data.len() * 8);
    for &byte in data {
        for bit in 0..8 {
            bits.push(byte >> bit & 1);
        }
    }
    bits
}

/// Packs bits (LSB-first per byte) back to bytes; the length must be a
/// multiple of 8.
pub fn bits_to_bytes(bits: &[u8]) -> Vec<u8> {
    assert!(bits.len() % 8 == 0);
    bits.chunks(8)
        .map(|chunk| chunk.iter().enumerate().fold(0u8, |b, (i, &v)| b | (v & 1) << i))
        .collect()
}
