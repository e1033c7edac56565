//! Benchmark harness: quantized indexing vs. the baseline range coder on a
//! grid of input sizes and ones counts, reporting payload sizes and coding
//! times. Sizes are deterministic under a fixed seed; times are advisory.

use std::time::Instant;

use anyhow::{bail, Context, Result};

use qi::container::payload_bit_lengths;
use qi::BigUint;
use qi::{
    decode_block, encode_block, merge_tip, radix_decode, radix_encode, split_tip, QuantTable,
    RadixTable,
};

use crate::gen::{bits_with_ones, cell_rng, vary_bits};
use crate::rangecoder::{ac_decode, ac_encode};

/// The grid's ones-count rows, in report order.
const ROW_LABELS: [&str; 10] =
    ["8", "16", "32", "N/64", "N/32", "N/16", "N/8", "N/4", "N/2", "Vary"];

fn row_ones(label: &str, size_bits: usize) -> Option<usize> {
    match label {
        "8" => Some(8),
        "16" => Some(16),
        "32" => Some(32),
        "N/64" => Some(size_bits / 64),
        "N/32" => Some(size_bits / 32),
        "N/16" => Some(size_bits / 16),
        "N/8" => Some(size_bits / 8),
        "N/4" => Some(size_bits / 4),
        "N/2" => Some(size_bits / 2),
        _ => None, // Vary derives its ones count from the pattern
    }
}

/// One (size, row) measurement, totalled over the trials.
#[derive(Debug, Clone)]
pub struct BenchCell {
    pub size_bits: usize,
    pub label: String,
    pub ones: usize,
    pub qi_bits: u64,
    pub ac_bits: u64,
    pub delta_pct: f64,
    pub qi_encode_ns: u64,
    pub qi_decode_ns: u64,
    pub ac_encode_ns: u64,
    pub ac_decode_ns: u64,
    pub speed_ratio: f64,
}

pub struct BenchReport {
    pub sizes: Vec<usize>,
    pub labels: Vec<String>,
    pub trials: usize,
    pub seed: u64,
    pub g: u32,
    pub block_size: usize,
    /// Row-major: cells[row * sizes.len() + size_index].
    pub cells: Vec<BenchCell>,
    pub footnotes: Vec<String>,
}

/// The block codes of one input plus everything the decoder needs, kept in
/// memory so the timed loops exercise only the coding arithmetic, not byte
/// serialization.
pub struct QiPayload {
    classes: Vec<(usize, usize)>,
    bodies: Vec<Vec<u8>>,
    radices: Vec<u64>,
    tip: BigUint,
    pub payload_bits: u64,
}

pub fn qi_encode_payload(
    bits: &[u8],
    block_size: usize,
    table: &QuantTable,
) -> Result<QiPayload> {
    let mut classes = Vec::new();
    let mut bodies = Vec::new();
    let mut digits = Vec::new();
    let mut radices = Vec::new();
    for chunk in bits.chunks(block_size) {
        let code = encode_block(chunk, table)?;
        let (digit, radix, body) = split_tip(&code, table);
        classes.push((code.m, code.k));
        bodies.push(body);
        digits.push(digit as u64);
        radices.push(radix as u64);
    }
    let tip_table = RadixTable::new(radices.clone(), table.g())?;
    let tip = radix_encode(&digits, &tip_table)?;
    let (body_bits, tip_bits) = payload_bit_lengths(&classes, table)?;
    Ok(QiPayload { classes, bodies, radices, tip, payload_bits: body_bits + tip_bits })
}

pub fn qi_decode_payload(payload: &QiPayload, table: &QuantTable) -> Result<Vec<u8>> {
    let tip_table = RadixTable::new(payload.radices.clone(), table.g())?;
    let digits = radix_decode(&payload.tip, &tip_table)?;
    let mut bits = Vec::new();
    for (i, &(m, k)) in payload.classes.iter().enumerate() {
        let code = merge_tip(digits[i] as u32, payload.radices[i] as u32, &payload.bodies[i], m, k, table)?;
        bits.extend(decode_block(&code, table)?);
    }
    Ok(bits)
}

fn ac_encode_blocks(bits: &[u8], block_size: usize) -> Vec<Vec<u8>> {
    bits.chunks(block_size)
        .map(|chunk| ac_encode(chunk, chunk.iter().filter(|&&b| b != 0).count()))
        .collect()
}

fn ac_decode_blocks(
    payloads: &[Vec<u8>],
    classes: &[(usize, usize)],
) -> Result<Vec<u8>> {
    let mut bits = Vec::new();
    for (payload, &(m, k)) in payloads.iter().zip(classes) {
        bits.extend(ac_decode(payload, m, k).context("range decoder failed")?);
    }
    Ok(bits)
}

/// Runs the full grid. Every cell round-trips both coders on every trial
/// before anything is timed; a round-trip failure aborts the report.
pub fn run_bench(
    sizes: &[usize],
    trials: usize,
    seed: u64,
    g: u32,
    block_size: usize,
) -> Result<BenchReport> {
    if trials == 0 {
        bail!("at least one trial is required");
    }
    let table = QuantTable::build(block_size, g)?;
    let mut cells = Vec::new();
    for (row, label) in ROW_LABELS.iter().enumerate() {
        for &size in sizes {
            let mut cell = BenchCell {
                size_bits: size,
                label: label.to_string(),
                ones: 0,
                qi_bits: 0,
                ac_bits: 0,
                delta_pct: 0.0,
                qi_encode_ns: 0,
                qi_decode_ns: 0,
                ac_encode_ns: 0,
                ac_decode_ns: 0,
                speed_ratio: 0.0,
            };
            for trial in 0..trials {
                let bits = match row_ones(label, size) {
                    Some(ones) => {
                        cell.ones = ones;
                        let mut rng = cell_rng(seed, &[size as u64, row as u64, trial as u64]);
                        bits_with_ones(size, ones, &mut rng)
                    }
                    None => {
                        let v = vary_bits(size);
                        cell.ones = v.iter().filter(|&&b| b == 1).count();
                        v
                    }
                };

                // Correctness gate: both coders must round-trip this input.
                let qi_payload = qi_encode_payload(&bits, block_size, &table)?;
                if qi_decode_payload(&qi_payload, &table)? != bits {
                    bail!("qi round trip failed at size {size}, row {label}");
                }
                let classes = qi_payload.classes.clone();
                let ac_payloads = ac_encode_blocks(&bits, block_size);
                if ac_decode_blocks(&ac_payloads, &classes)? != bits {
                    bail!("baseline round trip failed at size {size}, row {label}");
                }

                cell.qi_bits += qi_payload.payload_bits;
                cell.ac_bits += ac_payloads.iter().map(|p| p.len() as u64 * 8).sum::<u64>();

                let t = Instant::now();
                let timed_qi = qi_encode_payload(&bits, block_size, &table)?;
                cell.qi_encode_ns += t.elapsed().as_nanos() as u64;
                let t = Instant::now();
                let _ = qi_decode_payload(&timed_qi, &table)?;
                cell.qi_decode_ns += t.elapsed().as_nanos() as u64;

                let t = Instant::now();
                let timed_ac = ac_encode_blocks(&bits, block_size);
                cell.ac_encode_ns += t.elapsed().as_nanos() as u64;
                let t = Instant::now();
                let _ = ac_decode_blocks(&timed_ac, &classes)?;
                cell.ac_decode_ns += t.elapsed().as_nanos() as u64;
            }
            cell.delta_pct =
                (cell.ac_bits as f64 / cell.qi_bits.max(1) as f64 - 1.0) * 100.0;
            let qi_time = (cell.qi_encode_ns + cell.qi_decode_ns).max(1);
            cell.speed_ratio = (cell.ac_encode_ns + cell.ac_decode_ns) as f64 / qi_time as f64;
            cells.push(cell);
        }
    }
    Ok(BenchReport {
        sizes: sizes.to_vec(),
        labels: ROW_LABELS.iter().map(|s| s.to_string()).collect(),
        trials,
        seed,
        g,
        block_size,
        cells,
        footnotes: vec![
            "sizes are entropy-coded payload bits (index bodies + tip stream vs. range-coder bytes); per-block count fields excluded from both coders".into(),
            "baseline is this repository's static order-0 range coder with a per-block flush; ratios against other coders do not transfer".into(),
            "Vary row: ramp of consecutive int32 values, little-endian -- this construction of the pattern is an interpretation".into(),
            "time columns are advisory; size columns are deterministic for a fixed seed".into(),
        ],
    })
}

impl BenchReport {
    pub fn cell(&self, row: usize, size_idx: usize) -> &BenchCell {
        &self.cells[row * self.sizes.len() + size_idx]
    }

    fn size_label(bits: usize) -> String {
        if bits % 1024 == 0 {
            format!("{}K", bits / 1024)
        } else {
            bits.to_string()
        }
    }

    /// Aligned text table: one row per ones count, per size a size-delta
    /// column (AC/QI - 1, %) and a speed column (AC time / QI time).
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "qi vs baseline range coder  (g={}, block={}, trials={}, seed={})\n",
            self.g, self.block_size, self.trials, self.seed
        ));
        out.push_str(&format!("{:<8}", "#1's"));
        for &size in &self.sizes {
            out.push_str(&format!("{:>10}{:>8}", format!("N: {}", Self::size_label(size)), "Speed"));
        }
        out.push('\n');
        for (row, label) in self.labels.iter().enumerate() {
            out.push_str(&format!("{label:<8}"));
            for size_idx in 0..self.sizes.len() {
                let c = self.cell(row, size_idx);
                out.push_str(&format!("{:>10.3}{:>8.1}", c.delta_pct, c.speed_ratio));
            }
            out.push('\n');
        }
        for note in &self.footnotes {
            out.push_str(&format!("note: {note}\n"));
        }
        out
    }

    pub fn render_csv(&self) -> String {
        let mut out = String::from(
            "size_bits,ones_label,ones,qi_payload_bits,ac_payload_bits,size_delta_pct,\
             qi_encode_ns,qi_decode_ns,ac_encode_ns,ac_decode_ns,speed_ratio\n",
        );
        for c in &self.cells {
            out.push_str(&format!(
                "{},{},{},{},{},{:.4},{},{},{},{},{:.2}\n",
                c.size_bits,
                c.label,
                c.ones,
                c.qi_bits,
                c.ac_bits,
                c.delta_pct,
                c.qi_encode_ns,
                c.qi_decode_ns,
                c.ac_encode_ns,
                c.ac_decode_ns,
                c.speed_ratio
            ));
        }
        out
    }

    /// The size-only view of the CSV (the deterministic columns).
    pub fn size_columns(&self) -> Vec<(usize, String, usize, u64, u64)> {
        self.cells
            .iter()
            .map(|c| (c.size_bits, c.label.clone(), c.ones, c.qi_bits, c.ac_bits))
            .collect()
    }
}
