//! Fast invariant suite behind `qi selftest`: a condensed version of the
//! library's test battery, suitable for checking a build in a few seconds.

use qi::container::{read_stream, write_binary_stream, Decoded, StreamParams, TableCache};
use qi::{
    build_tree, decode_block, decode_multi, encode_block, encode_multi, merge_tip, perm_rank,
    perm_unrank, radix_decode, radix_encode, rank_exact, split_tip, sw_ceil, sw_sum_ceil,
    BigUint, PermTable, QuantTable, RadixTable,
};

use crate::gen::{bits_with_density, cell_rng};
use crate::rangecoder::{ac_decode, ac_encode};

type Check = (&'static str, fn() -> Result<(), String>);

fn err(msg: impl Into<String>) -> Result<(), String> {
    Err(msg.into())
}

fn check_sw_rounding() -> Result<(), String> {
    let q = sw_ceil(&BigUint::from(45u32), 4);
    if (q.mantissa(), q.shift()) != (12, 2) {
        return err("ceil(45, g=4) != 48");
    }
    let sum = sw_sum_ceil(&[sw_ceil(&BigUint::from(48u32), 4), sw_ceil(&BigUint::from(13u32), 4)], 4);
    if sum.value() != BigUint::from(64u32) {
        return err("delayed-rounding sum 48+13 != 64 at g=4");
    }
    let mut rng = cell_rng(0xA, &[1]);
    for _ in 0..2000 {
        let x: u64 = rand::Rng::random(&mut rng);
        let x = x | 1;
        for g in [4u32, 8, 17, 32] {
            let q = sw_ceil(&BigUint::from(x), g);
            if q.value() < BigUint::from(x) {
                return err(format!("ceil({x}, {g}) below input"));
            }
        }
    }
    Ok(())
}

fn check_table_entries() -> Result<(), String> {
    let t = QuantTable::build(8, 4).map_err(|e| e.to_string())?;
    let v = |x: i64, y: i64| t.lookup(x, y).unwrap().value();
    if v(4, 3) != BigUint::from(36u32) || v(5, 3) != BigUint::from(60u32) {
        return err("g=4 table entries off");
    }
    let t8 = QuantTable::build(8, 8).map_err(|e| e.to_string())?;
    if t8.lookup(5, 3).unwrap().value() != BigUint::from(56u32) {
        return err("g=8 table is not exact at (5,3)");
    }
    let t256 = QuantTable::build(256, 8).map_err(|e| e.to_string())?;
    let r = t256.excess_profile(256).map_err(|e| e.to_string())?;
    if (r.max_excess_bits - 0.8312371813).abs() > 1e-6 {
        return err(format!("front-256 max excess {} drifted", r.max_excess_bits));
    }
    Ok(())
}

fn check_block_codec() -> Result<(), String> {
    for g in [4u32, 32] {
        let t = QuantTable::build(10, g).map_err(|e| e.to_string())?;
        for m in 0..=10usize {
            for pattern in 0..(1u32 << m) {
                let bits: Vec<u8> = (0..m).map(|i| ((pattern >> i) & 1) as u8).collect();
                let code = encode_block(&bits, &t).map_err(|e| e.to_string())?;
                if decode_block(&code, &t).map_err(|e| e.to_string())? != bits {
                    return err(format!("round trip failed at m={m} g={g}"));
                }
            }
        }
    }
    let t = QuantTable::build(8, 32).unwrap();
    let bits: Vec<u8> = "00101001".bytes().map(|b| b - b'0').collect();
    let code = encode_block(&bits, &t).unwrap();
    if code.index.to_biguint() != rank_exact(&bits) || code.index.to_biguint() != BigUint::from(43u32) {
        return err("exact-regime rank of 00101001 != 43");
    }
    Ok(())
}

fn check_tip_packing() -> Result<(), String> {
    let t = QuantTable::build(512, 32).map_err(|e| e.to_string())?;
    let mut rng = cell_rng(0xB, &[2]);
    for p in [0.01, 0.2, 0.5] {
        let bits = bits_with_density(512, p, &mut rng);
        let code = encode_block(&bits, &t).unwrap();
        let (digit, radix, body) = split_tip(&code, &t);
        if digit >= radix {
            return err("tip digit outside radix");
        }
        let back = merge_tip(digit, radix, &body, code.m, code.k, &t).map_err(|e| e.to_string())?;
        if back != code {
            return err("tip split/merge mismatch");
        }
    }
    Ok(())
}

fn check_radix_and_perms() -> Result<(), String> {
    let rt = RadixTable::new(vec![2, 3, 5], 5).map_err(|e| e.to_string())?;
    if radix_encode(&[1, 2, 4], &rt).unwrap() != BigUint::from(29u32) {
        return err("mixed radix (1,2,4) != 29");
    }
    let gap_table = RadixTable::new(vec![3, 5, 7], 4).unwrap();
    let gap = gap_table.total().value() - BigUint::from(1u32);
    if radix_decode(&gap, &gap_table).is_ok() {
        return err("quantization gap decoded silently");
    }
    let pt = PermTable::new(6, 16).map_err(|e| e.to_string())?;
    let mut perm: Vec<usize> = (0..6).collect();
    loop {
        let r = perm_rank(&perm, &pt).unwrap();
        if perm_unrank(&r, 6, &pt).unwrap() != perm {
            return err("permutation rank/unrank mismatch");
        }
        let n = perm.len();
        let Some(i) = (0..n - 1).rev().find(|&i| perm[i] < perm[i + 1]) else { break };
        let j = (i + 1..n).rev().find(|&j| perm[j] > perm[i]).unwrap();
        perm.swap(i, j);
        perm[i + 1..].reverse();
    }
    Ok(())
}

fn check_multialpha() -> Result<(), String> {
    let t = QuantTable::build(300, 16).map_err(|e| e.to_string())?;
    let mut rng = cell_rng(0xC, &[3]);
    for alpha in [3usize, 256] {
        let symbols: Vec<u8> =
            (0..300).map(|_| rand::Rng::random_range(&mut rng, 0..alpha as u16) as u8).collect();
        let mut counts = vec![0u64; alpha];
        for &s in &symbols {
            counts[s as usize] += 1;
        }
        let tree = build_tree(&counts).map_err(|e| e.to_string())?;
        let codes = encode_multi(&symbols, &tree, &t).map_err(|e| e.to_string())?;
        if decode_multi(&codes, &counts, &t).map_err(|e| e.to_string())? != symbols {
            return err(format!("alpha={alpha} round trip failed"));
        }
    }
    Ok(())
}

fn check_container() -> Result<(), String> {
    let params = StreamParams { g: 16, block_size: 256 };
    let table = QuantTable::build(256, 16).map_err(|e| e.to_string())?;
    let mut cache = TableCache::new();
    let mut rng = cell_rng(0xD, &[4]);
    for p in [0.0, 1.0, 0.03, 0.5] {
        let bits = bits_with_density(997, p, &mut rng);
        let stream = write_binary_stream(&bits, &params, &table).map_err(|e| e.to_string())?;
        match read_stream(&stream, &mut cache) {
            Ok(Decoded::Binary(out)) if out == bits => {}
            other => return err(format!("container round trip failed: {other:?}")),
        }
        for cut in [0usize, 5, stream.len() - 1] {
            if read_stream(&stream[..cut], &mut cache).is_ok() {
                return err("truncated stream was accepted");
            }
        }
    }
    Ok(())
}

fn check_baseline_coder() -> Result<(), String> {
    let mut rng = cell_rng(0xE, &[5]);
    for p in [0.0, 0.1, 0.5, 1.0] {
        let bits = bits_with_density(4096, p, &mut rng);
        let k = bits.iter().filter(|&&b| b != 0).count();
        let payload = ac_encode(&bits, k);
        if ac_decode(&payload, bits.len(), k).map_err(|e| e.to_string())? != bits {
            return err("range coder round trip failed");
        }
    }
    Ok(())
}

/// Runs every check, printing one line each. Returns true when all pass.
pub fn run() -> bool {
    let checks: &[Check] = &[
        ("sliding-window rounding", check_sw_rounding),
        ("quantized table entries", check_table_entries),
        ("block codec round trips", check_block_codec),
        ("tip split/merge", check_tip_packing),
        ("mixed radix and permutations", check_radix_and_perms),
        ("multi-alphabet coding", check_multialpha),
        ("container format", check_container),
        ("baseline range coder", check_baseline_coder),
    ];
    let mut ok = true;
    for (name, check) in checks {
        match check() {
            Ok(()) => println!("[ok]   {name}"),
            Err(msg) => {
                ok = false;
                println!("[FAIL] {name}: {msg}");
            }
        }
    }
    ok
}

#[cfg(test)]
mod tests {
    #[test]
    fn selftest_passes() {
        assert!(super::run());
    }
}
