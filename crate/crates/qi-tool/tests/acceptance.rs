//! Acceptance suite: one test per release criterion, each printing a
//! `[PASS]` line (run with `--nocapture` to see them). The criteria pin the
//! coder's correctness contracts — exact-oracle agreement, pigeonhole
//! injectivity, table minimality and redundancy ceilings, container
//! robustness, and the benchmark grid — at fixed tolerances.

use std::sync::OnceLock;

use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qi::container::{
    payload_bit_lengths, read_stream, write_binary_stream, Decoded, StreamParams, TableCache,
};
use qi::oracle::log2_big;
use qi::{
    binom, build_tree, decode_block, encode_block, encode_multi, multinomial, perm_rank,
    perm_unrank, radix_decode, radix_encode, rank_exact, sw_sum_ceil, unrank_exact, BigUint,
    BinomialTable, PermTable, QuantTable, RadixTable,
};
use qi_tool::bench::run_bench;
use qi_tool::gen::{bits_with_density, bits_with_ones, cell_rng};

const LOG2_E: f64 = std::f64::consts::LOG2_E;

fn big_table() -> &'static QuantTable {
    static TABLE: OnceLock<QuantTable> = OnceLock::new();
    TABLE.get_or_init(|| QuantTable::build(4096, 32).expect("table build"))
}

fn all_strings(n: usize) -> impl Iterator<Item = Vec<u8>> {
    (0u32..1 << n).map(move |p| (0..n).map(|i| ((p >> i) & 1) as u8).collect())
}

#[test]
fn acceptance_01_known_path_rank() {
    let bits: Vec<u8> = "00101001".bytes().map(|b| b - b'0').collect();
    let rank = rank_exact(&bits);
    assert_eq!(rank, BigUint::from(43u32));
    assert_eq!(unrank_exact(&rank, 8, 3).unwrap(), bits);

    let table = QuantTable::build(8, 32).unwrap();
    let code = encode_block(&bits, &table).unwrap();
    assert_eq!(code.index.to_biguint(), BigUint::from(43u32));
    assert_eq!(decode_block(&code, &table).unwrap(), bits);
    println!("[PASS] 01 known 8-bit path ranks to 43 and round-trips in both coders");
}

#[test]
fn acceptance_02_oracle_bijection() {
    let binomials = BinomialTable::new(14);
    for n in 0..=14usize {
        let mut seen: Vec<std::collections::HashSet<BigUint>> =
            (0..=n).map(|_| Default::default()).collect();
        for bits in all_strings(n) {
            let k = bits.iter().filter(|&&b| b == 1).count();
            let rank = rank_exact(&bits);
            assert!(rank < binomials.get(n, k), "rank out of range at n={n} k={k}");
            assert!(seen[k].insert(rank.clone()), "rank collision at n={n} k={k}");
            assert_eq!(unrank_exact(&rank, n, k).unwrap(), bits);
        }
        for k in 0..=n {
            assert_eq!(BigUint::from(seen[k].len() as u64), binomials.get(n, k));
        }
    }
    println!("[PASS] 02 exact rank is a bijection onto [0, C(n,k)) for all n <= 14");
}

#[test]
fn acceptance_03_exact_regime_equivalence() {
    let table = QuantTable::build(14, 16).unwrap();
    for n in 0..=14usize {
        for bits in all_strings(n) {
            let code = encode_block(&bits, &table).unwrap();
            assert_eq!(code.index.to_biguint(), rank_exact(&bits), "mismatch at n={n}");
        }
    }
    println!("[PASS] 03 g=16 indices equal exact colex ranks on every string to n=14");
}

#[test]
fn acceptance_04_quantized_injectivity() {
    for g in [4u32, 6, 8] {
        let table = QuantTable::build(14, g).unwrap();
        for n in 0..=14usize {
            let mut seen: Vec<std::collections::HashSet<BigUint>> =
                (0..=n).map(|_| Default::default()).collect();
            for bits in all_strings(n) {
                let code = encode_block(&bits, &table).unwrap();
                let class = table.class_count(n, code.k);
                assert_eq!(
                    code.index.cmp_shifted(class.mantissa(), class.shift()),
                    std::cmp::Ordering::Less,
                    "index escaped its class at n={n} g={g}"
                );
                assert!(
                    seen[code.k].insert(code.index.to_biguint()),
                    "collision at n={n} k={} g={g}",
                    code.k
                );
            }
        }
    }
    println!("[PASS] 04 quantized indices distinct and in-class for g in {{4,6,8}}, n <= 14");
}

#[test]
fn acceptance_05_table_invariants() {
    let table = big_table();

    // Every interior entry is the SW ceiling of its predecessors' exact sum
    // and dominates that sum (interval composition).
    for n in 1..=4096i64 {
        for k in 1..n {
            let here = table.lookup(n - k, k).unwrap();
            let left = table.lookup(n - k - 1, k).unwrap();
            let down = table.lookup(n - k, k - 1).unwrap();
            assert_eq!(here, sw_sum_ceil(&[left, down], 32), "recurrence at n={n} k={k}");
            assert!(
                here.value() >= left.value() + down.value(),
                "interval composition violated at n={n} k={k}"
            );
        }
    }

    // Exact majorization against the oracle: exhaustive to front 256.
    let binomials = BinomialTable::new(256);
    for n in 0..=256usize {
        for k in 0..=n {
            assert!(
                table.lookup((n - k) as i64, k as i64).unwrap().value() >= binomials.get(n, k),
                "L < C at n={n} k={k}"
            );
        }
    }
    // ...and on 1000 random points over the full table.
    let mut rng = cell_rng(0x5150, &[5]);
    for _ in 0..1000 {
        let n = rng.random_range(257..=4096u64);
        let k = rng.random_range(0..=n);
        let quantized = table.lookup((n - k) as i64, k as i64).unwrap().value();
        assert!(quantized >= binom(n, k), "L < C at random point n={n} k={k}");
    }
    println!("[PASS] 05 n=4096 g=32 table: minimal recurrence, composition, L >= C");
}

#[test]
fn acceptance_06_redundancy_figures() {
    // One extra mantissa bit over log2(n): total excess stays under a bit.
    let n = 1usize << 12;
    let g = (n as f64).log2().ceil() as u32 + 1;
    assert_eq!(g, 13);
    let table = QuantTable::build(n, g).unwrap();
    let profile = table.excess_profile(n).unwrap();
    assert!(
        profile.max_excess_bits <= 0.7,
        "front-{n} max excess {} exceeds 0.7 bits",
        profile.max_excess_bits
    );
    assert!(
        profile.avg_excess_bits <= 0.4,
        "front-{n} avg excess {} exceeds 0.4 bits",
        profile.avg_excess_bits
    );
    assert!(profile.max_excess_bits < 1.45, "max excess at the theoretical ceiling");
    println!(
        "[PASS] 06 redundancy at n=4096, g=13: max {:.4} <= 0.7, avg {:.4} <= 0.4 bits",
        profile.max_excess_bits, profile.avg_excess_bits
    );
}

#[test]
fn acceptance_07_per_symbol_bound() {
    let mut rng = cell_rng(0x5150, &[7]);
    for g in [8u32, 16, 32] {
        let table = QuantTable::build(512, g).unwrap();
        let bound = LOG2_E / 2f64.powi(g as i32 - 1);
        for _ in 0..12 {
            let n = rng.random_range(1..=512usize);
            let profile = table.excess_profile(n).unwrap();
            assert!(
                profile.max_excess_bits / (n as f64) < bound,
                "per-symbol excess at n={n} g={g}: {} >= {bound}",
                profile.max_excess_bits / (n as f64)
            );
        }
    }
    println!("[PASS] 07 per-symbol excess below log2(e)/2^(g-1) for g in {{8,16,32}}");
}

#[test]
fn acceptance_08_end_to_end_size() {
    let table = big_table();
    let ks = [8usize, 64, 512, 2048];
    let mut rng = cell_rng(0x5150, &[8]);
    let mut bits = Vec::with_capacity(100 * 4096);
    let mut entropy = 0.0f64;
    let mut classes = Vec::with_capacity(100);
    for round in 0..100 {
        let k = ks[round % ks.len()];
        bits.extend(bits_with_ones(4096, k, &mut rng));
        entropy += log2_big(&binom(4096, k as u64));
        classes.push((4096usize, k));
    }
    let (body_bits, tip_bits) = payload_bit_lengths(&classes, table).unwrap();
    let payload = (body_bits + tip_bits) as f64;
    let budget = 0.01 * 100.0 + 17.0;
    assert!(
        payload - entropy <= budget,
        "payload {payload} exceeds entropy {entropy} by more than {budget} bits"
    );

    // The accounted payload is what the real stream carries.
    let params = StreamParams { g: 32, block_size: 4096 };
    let stream = write_binary_stream(&bits, &params, table).unwrap();
    let mut cache = TableCache::new();
    assert_eq!(read_stream(&stream, &mut cache).unwrap(), Decoded::Binary(bits));
    println!(
        "[PASS] 08 100-block payload is {:.2} bits over the exact class entropy (cap {budget})",
        payload - entropy
    );
}

enum Density {
    Zeros,
    Ones,
    Half,
    Random,
}

fn fuzz_input(m: usize, mode: &Density, rng: &mut ChaCha8Rng) -> Vec<u8> {
    match mode {
        Density::Zeros => vec![0u8; m],
        Density::Ones => vec![1u8; m],
        Density::Half => bits_with_ones(m, m / 2, rng),
        Density::Random => {
            let p = rng.random::<f64>();
            bits_with_density(m, p, rng)
        }
    }
}

#[test]
fn acceptance_09_roundtrip_and_corruption_fuzz() {
    let table = big_table();
    let params = StreamParams { g: 32, block_size: 4096 };
    let mut cache = TableCache::new();
    let mut rng = cell_rng(0x5150, &[9]);

    let mut plan: Vec<(usize, Density)> = Vec::new();
    for m in 0..=96usize {
        plan.push((m, Density::Zeros));
        plan.push((m, Density::Ones));
        plan.push((m, Density::Half));
        plan.push((m, Density::Random));
    }
    for _ in 0..9100 {
        let m = 2f64.powf(rng.random::<f64>() * 17.0) as usize;
        let mode = match rng.random_range(0..4u8) {
            0 => Density::Zeros,
            1 => Density::Ones,
            2 => Density::Half,
            _ => Density::Random,
        };
        plan.push((m.max(1), mode));
    }
    for _ in 0..600 {
        let m = 2f64.powf(10.0 + rng.random::<f64>() * 10.0) as usize;
        plan.push((m, Density::Random));
    }
    plan.push((1_000_000, Density::Zeros));
    plan.push((1_000_000, Density::Ones));
    plan.push((1_000_000, Density::Half));
    plan.push((999_983, Density::Random));
    assert!(plan.len() >= 10_000);

    let mut corruption_bases: Vec<(Vec<u8>, Vec<u8>)> = Vec::new();
    for (i, (m, mode)) in plan.iter().enumerate() {
        let bits = fuzz_input(*m, mode, &mut rng);
        let stream = write_binary_stream(&bits, &params, table).unwrap();
        match read_stream(&stream, &mut cache).unwrap() {
            Decoded::Binary(out) => assert_eq!(out, bits, "round trip failed at size {m}"),
            other => panic!("wrong payload kind: {other:?}"),
        }
        if corruption_bases.len() < 40 && *m > 64 && i % 7 == 0 {
            corruption_bases.push((bits, stream));
        }
    }

    // Truncations must always error. Other corruptions must error or change
    // the output; a corrupted stream may only reproduce the original input
    // when the mutation stayed inside the header (a different block size can
    // legitimately describe the same payload — tables are prefix-compatible).
    // Nothing may panic.
    let mut checked = 0usize;
    'outer: loop {
        for (bits, stream) in &corruption_bases {
            if checked >= 1000 {
                break 'outer;
            }
            checked += 1;
            let mut bad = stream.clone();
            match rng.random_range(0..4u8) {
                1 => {
                    bad.truncate(rng.random_range(0..bad.len()));
                    assert!(read_stream(&bad, &mut cache).is_err(), "truncation accepted");
                    continue;
                }
                0 => {
                    let pos = rng.random_range(0..bad.len() * 8);
                    bad[pos / 8] ^= 1 << (pos % 8);
                }
                2 => {
                    let pos = rng.random_range(0..bad.len());
                    bad[pos] = rng.random();
                }
                _ => {
                    for _ in 0..rng.random_range(1..4u8) {
                        bad.push(rng.random());
                    }
                }
            }
            if bad == *stream {
                continue;
            }
            match read_stream(&bad, &mut cache) {
                Err(_) => {}
                Ok(Decoded::Binary(out)) => {
                    if &out == bits {
                        let header_only = bad.len() == stream.len()
                            && bad[qi::container::HEADER_LEN..]
                                == stream[qi::container::HEADER_LEN..];
                        assert!(
                            header_only,
                            "payload corruption decoded silently to the original input"
                        );
                    }
                }
                Ok(Decoded::Bytes(_)) => {}
            }
        }
    }
    println!("[PASS] 09 {} round trips and {checked} corruptions behaved", plan.len());
}

#[test]
fn acceptance_10_radix_and_permutations() {
    // Exhaustive digit boxes with products up to 1e5.
    let boxes: [&[u64]; 4] =
        [&[2, 3, 5, 7, 4], &[10, 10, 10, 10, 10], &[16, 16, 16, 16], &[3; 10]];
    for g in [4u32, 6, 8] {
        for radices in boxes {
            let table = RadixTable::new(radices.to_vec(), g).unwrap();
            let total: u64 = radices.iter().product();
            assert!(total <= 100_000);
            let mut digits = vec![0u64; radices.len()];
            for mut v in 0..total {
                for (d, &r) in digits.iter_mut().zip(radices) {
                    *d = v % r;
                    v /= r;
                }
                let index = radix_encode(&digits, &table).unwrap();
                assert!(index < table.total().value());
                assert_eq!(radix_decode(&index, &table).unwrap(), digits, "g={g}");
            }
        }
    }

    // Permutations to n = 8, checked against an independent factorial-weight
    // oracle in the exact regime.
    let factorials: Vec<BigUint> = (0..9u64)
        .scan(BigUint::one(), |acc, i| {
            if i > 0 {
                *acc *= i;
            }
            Some(acc.clone())
        })
        .collect();
    for n in 0..=8usize {
        let exact = PermTable::new(n, 32).unwrap();
        let quantized = PermTable::new(n, 4).unwrap();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut seen = std::collections::HashSet::new();
        loop {
            let rank = perm_rank(&perm, &exact).unwrap();
            let mut lehmer = BigUint::zero();
            for i in 1..n {
                let c = perm[..i].iter().filter(|&&e| e > perm[i]).count() as u64;
                lehmer += &factorials[i] * c;
            }
            assert_eq!(rank, lehmer, "rank disagrees with Lehmer oracle at n={n}");
            assert_eq!(perm_unrank(&rank, n, &exact).unwrap(), perm);
            let qrank = perm_rank(&perm, &quantized).unwrap();
            assert_eq!(perm_unrank(&qrank, n, &quantized).unwrap(), perm);
            assert!(seen.insert(qrank));
            let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| perm[i] < perm[i + 1]) else {
                break;
            };
            let j = (i + 1..n).rev().find(|&j| perm[j] > perm[i]).unwrap();
            perm.swap(i, j);
            perm[i + 1..].reverse();
        }
    }
    println!("[PASS] 10 mixed-radix boxes and permutations rank/unrank exhaustively");
}

#[test]
fn acceptance_11_multialpha() {
    let table32 = big_table();
    let table16 = QuantTable::build(4096, 16).unwrap();
    let mut rng = cell_rng(0x5150, &[11]);
    for alpha in [3usize, 4, 8, 256] {
        let symbols: Vec<u8> = (0..4096).map(|_| rng.random_range(0..alpha as u16) as u8).collect();
        let mut counts = vec![0u64; alpha];
        for &s in &symbols {
            counts[s as usize] += 1;
        }
        let tree = build_tree(&counts).unwrap();

        for table in [table32, &table16] {
            let codes = encode_multi(&symbols, &tree, table).unwrap();
            assert_eq!(
                qi::decode_multi(&codes, &counts, table).unwrap(),
                symbols,
                "alpha={alpha} g={}",
                table.g()
            );
        }

        // Size bound at g=32: exact ceil(log2 class) per node against the
        // multinomial class entropy.
        let codes = encode_multi(&symbols, &tree, table32).unwrap();
        let total_bits: u64 = codes
            .iter()
            .map(|c| {
                let class = table32.class_count(c.m, c.k).value();
                let pow2 = class.trailing_zeros() == Some(class.bits() - 1);
                class.bits() - pow2 as u64
            })
            .sum();
        let entropy = log2_big(&multinomial(&counts));
        let slack = (alpha as f64 - 1.0) + 4096.0 * LOG2_E / 2f64.powi(31);
        assert!(
            (total_bits as f64) <= entropy + slack,
            "alpha={alpha}: {total_bits} bits over budget {entropy} + {slack}"
        );
    }
    println!("[PASS] 11 alphabets 3/4/8/256 round-trip; index bits within multinomial budget");
}

#[test]
fn acceptance_12_benchmark_grid() {
    let sizes = [4096usize, 8192, 32768, 131072];
    let report = run_bench(&sizes, 2, 7, 32, 4096).expect("bench run");
    assert_eq!(report.cells.len(), report.labels.len() * sizes.len());

    // Direction check on the sparse rows (ones <= 32): quantized indexing
    // never pays more bits than the baseline there.
    for (row, label) in report.labels.iter().enumerate() {
        for s in 0..sizes.len() {
            let cell = report.cell(row, s);
            assert!(cell.qi_bits > 0 && cell.ac_bits > 0);
            if matches!(label.as_str(), "8" | "16" | "32") {
                assert!(
                    cell.qi_bits <= cell.ac_bits,
                    "sparse row {label} at {} bits: qi {} > baseline {}",
                    cell.size_bits,
                    cell.qi_bits,
                    cell.ac_bits
                );
            }
        }
    }

    // Size columns are deterministic under the same seed.
    let again = run_bench(&sizes, 2, 7, 32, 4096).expect("bench rerun");
    assert_eq!(report.size_columns(), again.size_columns());

    // Speed ratios are reported, not asserted.
    let measured: Vec<f64> = report.cells.iter().map(|c| c.speed_ratio).collect();
    println!(
        "[PASS] 12 benchmark grid complete; measured speed ratios {:.1}..{:.1} (advisory)",
        measured.iter().cloned().fold(f64::INFINITY, f64::min),
        measured.iter().cloned().fold(0.0, f64::max)
    );
    println!("{}", report.render_text());
}
