//! Quantized binomial addend tables.
//!
//! The table holds one sliding-window integer per lattice point `(x, y)` with
//! `x + y <= n_max`: the quantized count of monotone paths from the origin to
//! that point. It is built front by front (a front is the anti-diagonal
//! `x + y = n`): axis points get count 1, and every interior point gets the
//! SW ceiling of the *exact* sum of its two predecessor counts. Propagating
//! the rounding this way keeps every entry at least the sum of its
//! predecessors — the interval-composition property the decoder relies on —
//! and at least the exact binomial, while staying the smallest table with
//! those properties at the given precision.

use std::collections::HashMap;
use std::io::{Read, Write};

use num_bigint::BigUint;
use thiserror::Error;

use crate::oracle::log2_big;
use crate::swi::{sw_sum_ceil, SwInt, MAX_PRECISION, MIN_PRECISION};

/// Default cap on table memory (mantissa + shift arrays).
pub const DEFAULT_TABLE_BUDGET_BYTES: usize = 1 << 30;

const DUMP_MAGIC: &[u8; 4] = b"QIT1";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TableError {
    #[error("precision {0} outside supported range {MIN_PRECISION}..={MAX_PRECISION}")]
    BadPrecision(u32),
    #[error("table of {entries} entries exceeds the memory budget of {budget} bytes")]
    CapacityExceeded { entries: usize, budget: usize },
    #[error("point ({x}, {y}) lies beyond front {n_max}")]
    OutOfRange { x: i64, y: i64, n_max: usize },
    #[error("table dump is malformed: {0}")]
    BadDump(&'static str),
}

/// Per-front redundancy measurement: how many extra bits the quantized counts
/// carry over the exact binomials along the front `x + y = n`.
#[derive(Debug, Clone, PartialEq)]
pub struct RedundancyReport {
    pub g: u32,
    pub n: usize,
    /// max over k of log2(L(n-k, k) / C(n, k))
    pub max_excess_bits: f64,
    /// mean over k = 0..=n of the same quantity
    pub avg_excess_bits: f64,
    /// n * log2(e) / 2^(g-1)
    pub theoretical_bound_bits: f64,
}

/// Quantized path-count table over all points with `x + y <= n_max`.
///
/// Storage is front-major (all entries of front n contiguous, ordered by
/// k = y), matching the build sweep and keeping a block's addend accesses on
/// one diagonal band. Mantissas and shifts are stored in separate packed
/// arrays; symmetric halves are stored in full (the recurrence preserves
/// `L(x,y) = L(y,x)` anyway, which the tests assert).
///
/// Immutable once built; share freely across threads.
pub struct QuantTable {
    g: u32,
    n_max: usize,
    mantissas: Vec<u32>,
    shifts: Vec<u16>,
}

#[inline]
fn entry_index(n: usize, k: usize) -> usize {
    n * (n + 1) / 2 + k
}

impl QuantTable {
    /// Builds the table with the default memory budget.
    pub fn build(n_max: usize, g: u32) -> Result<Self, TableError> {
        Self::build_with_budget(n_max, g, DEFAULT_TABLE_BUDGET_BYTES)
    }

    /// Builds the table front by front, failing upfront if the entry storage
    /// would exceed `budget_bytes`.
    pub fn build_with_budget(n_max: usize, g: u32, budget_bytes: usize) -> Result<Self, TableError> {
        if !(MIN_PRECISION..=MAX_PRECISION).contains(&g) {
            return Err(TableError::BadPrecision(g));
        }
        let entries = (n_max + 1)
            .checked_mul(n_max + 2)
            .map(|v| v / 2)
            .ok_or(TableError::CapacityExceeded { entries: usize::MAX, budget: budget_bytes })?;
        if entries.saturating_mul(6) > budget_bytes {
            return Err(TableError::CapacityExceeded { entries, budget: budget_bytes });
        }
        let mut mantissas = vec![0u32; entries];
        let mut shifts = vec![0u16; entries];
        mantissas[0] = 1; // single empty path to the origin
        for n in 1..=n_max {
            let base = entry_index(n, 0);
            let prev = entry_index(n - 1, 0);
            mantissas[base] = 1;
            mantissas[base + n] = 1;
            for k in 1..n {
                let a = SwInt::from_parts(mantissas[prev + k - 1] as u64, shifts[prev + k - 1] as u64, g);
                let b = SwInt::from_parts(mantissas[prev + k] as u64, shifts[prev + k] as u64, g);
                let q = sw_sum_ceil(&[a, b], g);
                debug_assert!(q.mantissa() <= u32::MAX as u64);
                debug_assert!(q.shift() <= u16::MAX as u64, "shift overflows packed storage");
                mantissas[base + k] = q.mantissa() as u32;
                shifts[base + k] = q.shift() as u16;
            }
        }
        Ok(QuantTable { g, n_max, mantissas, shifts })
    }

    pub fn g(&self) -> u32 {
        self.g
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Quantized count at `(x, y)`. Points with a negative coordinate are
    /// unreachable and count 0; points beyond the last front are an error.
    pub fn lookup(&self, x: i64, y: i64) -> Result<SwInt, TableError> {
        if x < 0 || y < 0 {
            return Ok(SwInt::ZERO);
        }
        let (x, y) = (x as usize, y as usize);
        if x + y > self.n_max {
            return Err(TableError::OutOfRange { x: x as i64, y: y as i64, n_max: self.n_max });
        }
        Ok(self.entry(x + y, y))
    }

    /// Interval length for the class of length-`m`, `k`-ones strings.
    pub fn class_count(&self, m: usize, k: usize) -> SwInt {
        debug_assert!(k <= m && m <= self.n_max);
        self.entry(m, k)
    }

    #[inline]
    pub(crate) fn entry(&self, n: usize, k: usize) -> SwInt {
        let i = entry_index(n, k);
        SwInt::from_parts(self.mantissas[i] as u64, self.shifts[i] as u64, self.g)
    }

    /// Measures the rounding excess along front `n` against exact binomials.
    pub fn excess_profile(&self, n: usize) -> Result<RedundancyReport, TableError> {
        if n > self.n_max {
            return Err(TableError::OutOfRange { x: n as i64, y: 0, n_max: self.n_max });
        }
        let mut binomial = BigUint::from(1u32);
        let mut max_excess = 0.0f64;
        let mut sum_excess = 0.0f64;
        for k in 0..=n {
            if k > 0 {
                binomial = binomial * (n - k + 1) / k;
            }
            let quantized = self.entry(n, k).value();
            let excess = if quantized == binomial {
                0.0
            } else {
                log2_big(&quantized) - log2_big(&binomial)
            };
            max_excess = max_excess.max(excess);
            sum_excess += excess;
        }
        Ok(RedundancyReport {
            g: self.g,
            n,
            max_excess_bits: max_excess,
            avg_excess_bits: sum_excess / (n + 1) as f64,
            theoretical_bound_bits: n as f64 * std::f64::consts::LOG2_E / 2f64.powi(self.g as i32 - 1),
        })
    }

    /// Serializes the table: magic, g, n_max, then per front-major entry the
    /// mantissa (4 bytes LE) and shift (2 bytes LE).
    pub fn write_to<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        out.write_all(DUMP_MAGIC)?;
        out.write_all(&[self.g as u8])?;
        out.write_all(&(self.n_max as u32).to_le_bytes())?;
        for i in 0..self.mantissas.len() {
            out.write_all(&self.mantissas[i].to_le_bytes())?;
            out.write_all(&self.shifts[i].to_le_bytes())?;
        }
        Ok(())
    }

    /// Reads a table dump, validating shape and normalization invariants.
    pub fn read_from<R: Read>(mut input: R) -> Result<Self, TableError> {
        let read_err = |_| TableError::BadDump("unexpected end of dump");
        let mut head = [0u8; 9];
        input.read_exact(&mut head).map_err(read_err)?;
        if &head[..4] != DUMP_MAGIC {
            return Err(TableError::BadDump("bad magic"));
        }
        let g = head[4] as u32;
        if !(MIN_PRECISION..=MAX_PRECISION).contains(&g) {
            return Err(TableError::BadPrecision(g));
        }
        let n_max = u32::from_le_bytes(head[5..9].try_into().unwrap()) as usize;
        let entries = (n_max + 1)
            .checked_mul(n_max + 2)
            .map(|v| v / 2)
            .filter(|e| e.saturating_mul(6) <= DEFAULT_TABLE_BUDGET_BYTES)
            .ok_or(TableError::BadDump("front count out of range"))?;
        let mut mantissas = vec![0u32; entries];
        let mut shifts = vec![0u16; entries];
        let mut buf = [0u8; 6];
        for i in 0..entries {
            input.read_exact(&mut buf).map_err(read_err)?;
            mantissas[i] = u32::from_le_bytes(buf[..4].try_into().unwrap());
            shifts[i] = u16::from_le_bytes(buf[4..].try_into().unwrap());
        }
        if input.read(&mut buf).map_err(read_err)? != 0 {
            return Err(TableError::BadDump("trailing data"));
        }
        let table = QuantTable { g, n_max, mantissas, shifts };
        table.validate_shape()?;
        Ok(table)
    }

    fn validate_shape(&self) -> Result<(), TableError> {
        for n in 0..=self.n_max {
            for k in 0..=n {
                let i = entry_index(n, k);
                let (w, s) = (self.mantissas[i] as u64, self.shifts[i]);
                if k == 0 || k == n {
                    if w != 1 || s != 0 {
                        return Err(TableError::BadDump("axis entry is not 1"));
                    }
                } else if w >= 1u64 << self.g || (s > 0 && w >> (self.g - 1) != 1) || w == 0 {
                    return Err(TableError::BadDump("entry violates mantissa normalization"));
                }
            }
        }
        Ok(())
    }
}

/// Minimal mantissa width that keeps the total rounding excess for `n`
/// symbols below `c` bits: `ceil(1 + log2(log2 e) + log2(n / c))`, clamped to
/// the supported range.
pub fn min_precision(n: u64, c: f64) -> u32 {
    assert!(n >= 1 && c > 0.0);
    let raw = 1.0 + std::f64::consts::LOG2_E.log2() + ((n as f64) / c).log2();
    (raw.ceil() as i64).clamp(MIN_PRECISION as i64, MAX_PRECISION as i64) as u32
}

/// Fixed-point (32 fractional bits) table of log2(i!) for i = 0..=n.
pub fn log_factorials(n: usize) -> Vec<u64> {
    let scale = (1u64 << 32) as f64;
    let mut table = Vec::with_capacity(n + 1);
    table.push(0u64);
    for i in 1..=n {
        let step = ((i as f64).log2() * scale).round() as u64;
        table.push(table[i - 1] + step);
    }
    table
}

/// Space-saving accessor for entry shifts: estimates the shift from a
/// log-factorial array and corrects the estimate through an exceptions map
/// recorded where the estimate disagrees with the stored table (entries whose
/// count sits next to a power-of-two boundary). Lookups are exact by
/// construction.
pub struct ShiftReconstructor {
    g: u32,
    logfact: Vec<u64>,
    exceptions: HashMap<(u32, u32), u16>,
}

impl ShiftReconstructor {
    pub fn new(table: &QuantTable) -> Self {
        let logfact = log_factorials(table.n_max());
        let mut exceptions = HashMap::new();
        for n in 0..=table.n_max() {
            for k in 0..=n {
                let stored = table.entry(n, k).shift();
                let estimated = estimate_shift(&logfact, n, k, table.g());
                if stored != estimated as u64 {
                    exceptions.insert((n as u32, k as u32), stored as u16);
                }
            }
        }
        ShiftReconstructor { g: table.g(), logfact, exceptions }
    }

    /// Shift of the entry at front `n`, offset `k` — identical to the stored
    /// value.
    pub fn shift(&self, n: usize, k: usize) -> u64 {
        if let Some(&s) = self.exceptions.get(&(n as u32, k as u32)) {
            return s as u64;
        }
        estimate_shift(&self.logfact, n, k, self.g)
    }

    /// Number of entries the estimate could not place on its own.
    pub fn exception_count(&self) -> usize {
        self.exceptions.len()
    }
}

fn estimate_shift(logfact: &[u64], n: usize, k: usize, g: u32) -> u64 {
    // floor(log2 C(n,k)) + 1 - g, clamped at zero.
    let est = logfact[n] - logfact[k] - logfact[n - k];
    let floor_log2 = est >> 32;
    (floor_log2 + 1).saturating_sub(g as u64)
}
