//! The `QIX1` stream format.
//!
//! Layout: a fixed 19-byte header, one bit-packed symbol-count field per
//! block, the concatenated block index bodies, and finally a single
//! mixed-radix number carrying every block's 16-bit tip digit. Every field
//! length is computable by the decoder from the header and the count fields
//! alone — there are no explicit length prefixes, and a well-formed stream
//! has no slack: padding bits must be zero and no bytes may follow the
//! payload.
//!
//! Packing the per-block index tips into one trailing mixed-radix number is
//! what removes the bit-fraction loss at block boundaries: a block's body is
//! a whole number of bits by construction, and the fractional residue of
//! every block accumulates in the tip number instead of being rounded up per
//! block.
//!
//! ```text
//! header   := "QIX1" version:u8 g:u8 block_size:u32le total_symbols:u64le flags:u8
//! flags    := bit0: bits were inverted, bit1: byte-alphabet payload
//! binary   := header k_fields bodies tip_stream zero_pad
//! bytes    := header count_fields bodies tip_stream zero_pad
//! ```

use std::borrow::Cow;
use std::collections::HashMap;

use num_bigint::BigUint;
use thiserror::Error;

use crate::codec::{decode_block, encode_block, merge_tip, split_tip, BlockCode, CodecError};
use crate::multialpha::{build_tree, decode_multi, encode_multi, MultiAlphaError};
use crate::qtable::{QuantTable, TableError};
use crate::radix::{radix_decode, radix_encode, RadixError, RadixTable};
use crate::swi::{SwInt, MAX_PRECISION, MIN_PRECISION};

pub const MAGIC: [u8; 4] = *b"QIX1";
pub const VERSION: u8 = 1;
pub const HEADER_LEN: usize = 19;

const FLAG_INVERTED: u8 = 0b01;
const FLAG_BYTES: u8 = 0b10;
const BYTE_ALPHA: usize = 256;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ContainerError {
    #[error("not a QIX1 stream")]
    BadMagic,
    #[error("unsupported stream version {0}")]
    BadVersion(u8),
    #[error("malformed header: {0}")]
    BadHeader(&'static str),
    #[error("stream ends before its declared contents")]
    TruncatedStream,
    #[error("data past the declared end of stream")]
    TrailingData,
    #[error("corrupt stream: {0}")]
    Corrupt(&'static str),
    #[error("encoder parameters do not match the supplied table")]
    InconsistentParameters,
    #[error(transparent)]
    Table(#[from] TableError),
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    Radix(#[from] RadixError),
    #[error(transparent)]
    Multi(#[from] MultiAlphaError),
}

/// Encoding parameters carried in the stream header.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StreamParams {
    pub g: u32,
    pub block_size: usize,
}

impl Default for StreamParams {
    fn default() -> Self {
        StreamParams { g: 32, block_size: 4096 }
    }
}

/// Decoded stream payload.
#[derive(Debug, PartialEq, Eq)]
pub enum Decoded {
    /// Binary payload: one 0/1 value per symbol.
    Binary(Vec<u8>),
    /// Byte-alphabet payload.
    Bytes(Vec<u8>),
}

/// Cache of built tables keyed by (g, n_max), for decoding many streams
/// without rebuilding.
#[derive(Default)]
pub struct TableCache {
    map: HashMap<(u32, usize), QuantTable>,
}

impl TableCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get_or_build(&mut self, g: u32, n_max: usize) -> Result<&QuantTable, TableError> {
        use std::collections::hash_map::Entry;
        match self.map.entry((g, n_max)) {
            Entry::Occupied(e) => Ok(e.into_mut()),
            Entry::Vacant(e) => Ok(e.insert(QuantTable::build(n_max, g)?)),
        }
    }
}

/// Maps the input so that zeros are the (globally) more common bit: if ones
/// outnumber zeros the whole input is flipped and the flag set. Ties keep
/// the original polarity.
pub fn prepare_bits(bits: &[u8]) -> (Cow<'_, [u8]>, bool) {
    let ones = bits.iter().filter(|&&b| b != 0).count();
    if ones * 2 > bits.len() {
        (Cow::Owned(bits.iter().map(|&b| b ^ 1).collect()), true)
    } else {
        (Cow::Borrowed(bits), false)
    }
}

// ---------------------------------------------------------------------------
// bit-level IO (LSB-first within each byte)
// ---------------------------------------------------------------------------

struct BitWriter {
    bytes: Vec<u8>,
    bit_len: usize,
}

impl BitWriter {
    fn new() -> Self {
        BitWriter { bytes: Vec::new(), bit_len: 0 }
    }

    fn push_bit(&mut self, bit: bool) {
        if self.bit_len % 8 == 0 {
            self.bytes.push(0);
        }
        if bit {
            *self.bytes.last_mut().unwrap() |= 1 << (self.bit_len % 8);
        }
        self.bit_len += 1;
    }

    fn push_bits(&mut self, value: u64, count: u32) {
        debug_assert!(count as usize <= 64);
        debug_assert!(count == 64 || value >> count == 0);
        for i in 0..count {
            self.push_bit(value >> i & 1 == 1);
        }
    }

    fn push_biguint(&mut self, value: &BigUint, count: u64) {
        debug_assert!(value.bits() <= count);
        let bytes = value.to_bytes_le();
        for i in 0..count {
            let byte = bytes.get((i / 8) as usize).copied().unwrap_or(0);
            self.push_bit(byte >> (i % 8) & 1 == 1);
        }
    }

    fn into_bytes(self) -> Vec<u8> {
        self.bytes
    }
}

struct BitReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> BitReader<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        BitReader { bytes, pos: 0 }
    }

    fn remaining(&self) -> usize {
        self.bytes.len() * 8 - self.pos
    }

    fn read_bit(&mut self) -> Result<bool, ContainerError> {
        if self.pos >= self.bytes.len() * 8 {
            return Err(ContainerError::TruncatedStream);
        }
        let bit = self.bytes[self.pos / 8] >> (self.pos % 8) & 1 == 1;
        self.pos += 1;
        Ok(bit)
    }

    fn read_bits(&mut self, count: u32) -> Result<u64, ContainerError> {
        debug_assert!(count <= 64);
        let mut v = 0u64;
        for i in 0..count {
            if self.read_bit()? {
                v |= 1 << i;
            }
        }
        Ok(v)
    }

    fn read_bit_vec(&mut self, count: usize) -> Result<Vec<u8>, ContainerError> {
        let mut v = Vec::with_capacity(count);
        for _ in 0..count {
            v.push(self.read_bit()? as u8);
        }
        Ok(v)
    }

    fn read_biguint(&mut self, count: u64) -> Result<BigUint, ContainerError> {
        let mut bytes = vec![0u8; count.div_ceil(8) as usize];
        for i in 0..count {
            if self.read_bit()? {
                bytes[(i / 8) as usize] |= 1 << (i % 8);
            }
        }
        Ok(BigUint::from_bytes_le(&bytes))
    }

    /// Consumes the zero padding up to the byte boundary and requires the
    /// stream to end exactly there.
    fn expect_end(&mut self) -> Result<(), ContainerError> {
        while self.pos % 8 != 0 {
            if self.read_bit()? {
                return Err(ContainerError::Corrupt("nonzero padding"));
            }
        }
        if self.pos < self.bytes.len() * 8 {
            return Err(ContainerError::TrailingData);
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// shared layout arithmetic
// ---------------------------------------------------------------------------

/// Width of a count field for a block of `m` symbols: enough bits for every
/// value in 0..=m.
fn count_field_width(m: usize) -> u32 {
    debug_assert!(m >= 1);
    64 - (m as u64).leading_zeros()
}

/// Bits needed to transmit one value of the range [0, total): the ceiling of
/// log2(total).
fn ceil_log2(total: SwInt) -> u64 {
    debug_assert!(!total.is_zero());
    let exact_power = total.mantissa().is_power_of_two();
    total.bit_len() - exact_power as u64
}

fn block_lengths(total: u64, block_size: usize) -> Vec<usize> {
    let mut lens = Vec::new();
    let mut left = total;
    while left > 0 {
        let m = left.min(block_size as u64) as usize;
        lens.push(m);
        left -= m as u64;
    }
    lens
}

/// Body and tip bit counts for a sequence of block classes: the entropy-coded
/// payload of a stream, excluding headers and count fields. Exposed so
/// benchmarks and size accounting can recompute the layout independently of
/// serialization.
pub fn payload_bit_lengths(
    classes: &[(usize, usize)],
    table: &QuantTable,
) -> Result<(u64, u64), ContainerError> {
    let mut body_bits = 0u64;
    let mut radices = Vec::with_capacity(classes.len());
    for &(m, k) in classes {
        let class = table.class_count(m, k);
        body_bits += class.bit_len().saturating_sub(16);
        radices.push(tip_radix(class));
    }
    let tip_table = RadixTable::new(radices, table.g())?;
    Ok((body_bits, ceil_log2(tip_table.total())))
}

fn tip_radix(class: SwInt) -> u64 {
    let bits = class.bit_len();
    if bits <= 16 {
        class.value_u128().unwrap() as u64
    } else {
        let w = class.mantissa();
        let wb = 64 - w.leading_zeros() as u64;
        let top16 = if wb >= 16 { w >> (wb - 16) } else { w << (16 - wb) };
        top16 + 1
    }
}

fn header_bytes(params: &StreamParams, total: u64, flags: u8) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN);
    out.extend_from_slice(&MAGIC);
    out.push(VERSION);
    out.push(params.g as u8);
    out.extend_from_slice(&(params.block_size as u32).to_le_bytes());
    out.extend_from_slice(&total.to_le_bytes());
    out.push(flags);
    out
}

fn check_params(params: &StreamParams, table: &QuantTable) -> Result<(), ContainerError> {
    if !(MIN_PRECISION..=MAX_PRECISION).contains(&params.g)
        || params.block_size == 0
        || params.block_size > u32::MAX as usize
        || params.g != table.g()
        || params.block_size > table.n_max()
    {
        return Err(ContainerError::InconsistentParameters);
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// encoding
// ---------------------------------------------------------------------------

/// Encodes a binary symbol sequence into a complete stream. The input is
/// inverted first if ones dominate globally (recorded in the header flags).
pub fn write_binary_stream(
    bits: &[u8],
    params: &StreamParams,
    table: &QuantTable,
) -> Result<Vec<u8>, ContainerError> {
    check_params(params, table)?;
    let (bits, inverted) = prepare_bits(bits);
    let total = bits.len() as u64;
    let mut out = header_bytes(params, total, if inverted { FLAG_INVERTED } else { 0 });

    let mut codes = Vec::new();
    for chunk in bits.chunks(params.block_size) {
        codes.push(encode_block(chunk, table)?);
    }
    let mut writer = BitWriter::new();
    for code in &codes {
        writer.push_bits(code.k as u64, count_field_width(code.m));
    }
    write_code_payload(&codes, table, params.g, &mut writer)?;
    out.extend_from_slice(&writer.into_bytes());
    Ok(out)
}

/// Encodes a byte sequence as a multi-alphabet stream: per block, 256 symbol
/// counts followed (in the shared body section) by the code-tree node bodies.
pub fn write_byte_stream(
    data: &[u8],
    params: &StreamParams,
    table: &QuantTable,
) -> Result<Vec<u8>, ContainerError> {
    check_params(params, table)?;
    let total = data.len() as u64;
    let mut out = header_bytes(params, total, FLAG_BYTES);

    let mut writer = BitWriter::new();
    let mut codes = Vec::new();
    for chunk in data.chunks(params.block_size) {
        let width = count_field_width(chunk.len());
        let mut counts = vec![0u64; BYTE_ALPHA];
        for &b in chunk {
            counts[b as usize] += 1;
        }
        for &c in &counts {
            writer.push_bits(c, width);
        }
        let tree = build_tree(&counts)?;
        codes.extend(encode_multi(chunk, &tree, table)?);
    }
    write_code_payload(&codes, table, params.g, &mut writer)?;
    out.extend_from_slice(&writer.into_bytes());
    Ok(out)
}

fn write_code_payload(
    codes: &[BlockCode],
    table: &QuantTable,
    g: u32,
    writer: &mut BitWriter,
) -> Result<(), ContainerError> {
    let mut digits = Vec::with_capacity(codes.len());
    let mut radices = Vec::with_capacity(codes.len());
    for code in codes {
        let (digit, radix, body) = split_tip(code, table);
        for &b in &body {
            writer.push_bit(b != 0);
        }
        digits.push(digit as u64);
        radices.push(radix as u64);
    }
    let tip_table = RadixTable::new(radices, g)?;
    let tip_index = radix_encode(&digits, &tip_table)?;
    writer.push_biguint(&tip_index, ceil_log2(tip_table.total()));
    Ok(())
}

// ---------------------------------------------------------------------------
// decoding
// ---------------------------------------------------------------------------

/// Decodes a complete stream. Tables are taken from (or built into) the
/// cache, keyed by the header's (g, block_size).
pub fn read_stream(bytes: &[u8], cache: &mut TableCache) -> Result<Decoded, ContainerError> {
    if bytes.len() < HEADER_LEN {
        return Err(ContainerError::TruncatedStream);
    }
    if bytes[..4] != MAGIC {
        return Err(ContainerError::BadMagic);
    }
    if bytes[4] != VERSION {
        return Err(ContainerError::BadVersion(bytes[4]));
    }
    let g = bytes[5] as u32;
    if !(MIN_PRECISION..=MAX_PRECISION).contains(&g) {
        return Err(ContainerError::BadHeader("precision out of range"));
    }
    let block_size = u32::from_le_bytes(bytes[6..10].try_into().unwrap()) as usize;
    if block_size == 0 {
        return Err(ContainerError::BadHeader("zero block size"));
    }
    let total = u64::from_le_bytes(bytes[10..18].try_into().unwrap());
    let flags = bytes[18];
    if flags & !(FLAG_INVERTED | FLAG_BYTES) != 0 {
        return Err(ContainerError::BadHeader("unknown flags"));
    }
    let byte_mode = flags & FLAG_BYTES != 0;
    if byte_mode && flags & FLAG_INVERTED != 0 {
        return Err(ContainerError::BadHeader("inversion flag on byte payload"));
    }

    let mut reader = BitReader::new(&bytes[HEADER_LEN..]);
    if total == 0 {
        reader.expect_end()?;
        return Ok(if byte_mode { Decoded::Bytes(Vec::new()) } else { Decoded::Binary(Vec::new()) });
    }

    // Reject absurd block counts before any allocation or table build: the
    // count fields alone must fit in what's actually present.
    let n_blocks_u128 = (total as u128).div_ceil(block_size as u128);
    let fields_per_block = if byte_mode { BYTE_ALPHA as u128 } else { 1 };
    let min_field_bits = n_blocks_u128 * fields_per_block; // every field is >= 1 bit
    if min_field_bits > reader.remaining() as u128 {
        return Err(ContainerError::TruncatedStream);
    }
    let n_blocks = n_blocks_u128 as usize;
    let lens = block_lengths(total, block_size);
    debug_assert_eq!(lens.len(), n_blocks);

    let table = cache.get_or_build(g, block_size)?;

    if byte_mode {
        read_byte_blocks(&mut reader, &lens, g, table)
    } else {
        read_binary_blocks(&mut reader, &lens, g, table, flags & FLAG_INVERTED != 0)
    }
}

fn read_binary_blocks(
    reader: &mut BitReader,
    lens: &[usize],
    g: u32,
    table: &QuantTable,
    inverted: bool,
) -> Result<Decoded, ContainerError> {
    let mut classes = Vec::with_capacity(lens.len());
    for &m in lens {
        let k = reader.read_bits(count_field_width(m))? as usize;
        if k > m {
            return Err(ContainerError::Corrupt("ones count exceeds block length"));
        }
        classes.push((m, k));
    }
    let codes = read_code_payload(reader, &classes, g, table)?;
    let mut bits = Vec::new();
    for code in &codes {
        bits.extend(decode_block(code, table)?);
    }
    reader.expect_end()?;
    if inverted {
        for b in &mut bits {
            *b ^= 1;
        }
    }
    Ok(Decoded::Binary(bits))
}

fn read_byte_blocks(
    reader: &mut BitReader,
    lens: &[usize],
    g: u32,
    table: &QuantTable,
) -> Result<Decoded, ContainerError> {
    let mut block_counts = Vec::with_capacity(lens.len());
    let mut classes = Vec::new();
    for &m in lens {
        let width = count_field_width(m);
        let mut counts = vec![0u64; BYTE_ALPHA];
        let mut sum = 0u64;
        for c in counts.iter_mut() {
            *c = reader.read_bits(width)?;
            sum += *c;
        }
        if sum != m as u64 {
            return Err(ContainerError::Corrupt("symbol counts do not sum to block length"));
        }
        let tree = build_tree(&counts)?;
        classes.extend(tree.node_classes());
        block_counts.push(counts);
    }
    let codes = read_code_payload(reader, &classes, g, table)?;
    let mut out = Vec::new();
    let mut next = 0usize;
    for counts in &block_counts {
        let node_count = BYTE_ALPHA - 1;
        out.extend(decode_multi(&codes[next..next + node_count], counts, table)?);
        next += node_count;
    }
    reader.expect_end()?;
    Ok(Decoded::Bytes(out))
}

fn read_code_payload(
    reader: &mut BitReader,
    classes: &[(usize, usize)],
    g: u32,
    table: &QuantTable,
) -> Result<Vec<BlockCode>, ContainerError> {
    // Body lengths and tip radices follow from the classes alone.
    let mut body_lens = Vec::with_capacity(classes.len());
    let mut radices = Vec::with_capacity(classes.len());
    let mut body_total = 0u64;
    for &(m, k) in classes {
        if m > table.n_max() || k > m {
            return Err(ContainerError::Corrupt("class outside table"));
        }
        let class = table.class_count(m, k);
        let body_len = class.bit_len().saturating_sub(16);
        body_total += body_len;
        body_lens.push(body_len as usize);
        radices.push(tip_radix(class));
    }
    if body_total > reader.remaining() as u64 {
        return Err(ContainerError::TruncatedStream);
    }
    let mut bodies = Vec::with_capacity(classes.len());
    for &len in &body_lens {
        bodies.push(reader.read_bit_vec(len)?);
    }
    let tip_table = RadixTable::new(radices, g)?;
    let tip_index = reader.read_biguint(ceil_log2(tip_table.total()))?;
    let digits = radix_decode(&tip_index, &tip_table)?;
    let mut codes = Vec::with_capacity(classes.len());
    for i in 0..classes.len() {
        let (m, k) = classes[i];
        codes.push(merge_tip(
            digits[i] as u32,
            tip_table.radices()[i] as u32,
            &bodies[i],
            m,
            k,
            table,
        )?);
    }
    Ok(codes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn hex(bytes: &[u8]) -> String {
        bytes.iter().map(|b| format!("{b:02x}")).collect()
    }

    fn roundtrip_binary(bits: &[u8], params: &StreamParams) -> Vec<u8> {
        let table = QuantTable::build(params.block_size, params.g).unwrap();
        let stream = write_binary_stream(bits, params, &table).unwrap();
        let mut cache = TableCache::new();
        match read_stream(&stream, &mut cache).unwrap() {
            Decoded::Binary(b) => {
                assert_eq!(b, bits);
                stream
            }
            _ => panic!("wrong payload kind"),
        }
    }

    #[test]
    fn empty_stream_is_bare_header() {
        let params = StreamParams::default();
        let table = QuantTable::build(64, 32).unwrap();
        let params = StreamParams { block_size: 64, ..params };
        let stream = write_binary_stream(&[], &params, &table).unwrap();
        assert_eq!(stream.len(), HEADER_LEN);
        // Frozen golden bytes for the default-precision empty stream.
        let table4096 = QuantTable::build(4096, 32).unwrap();
        let golden = write_binary_stream(&[], &StreamParams::default(), &table4096).unwrap();
        assert_eq!(hex(&golden), "51495831012000100000000000000000000000");
        let mut cache = TableCache::new();
        assert_eq!(read_stream(&golden, &mut cache).unwrap(), Decoded::Binary(Vec::new()));
    }

    #[test]
    fn single_empty_class_block_golden() {
        // One all-zero block of 8 symbols: header, a 4-bit zero count field,
        // no body, a radix-1 tip contributing no bits, zero padding.
        let params = StreamParams { g: 32, block_size: 8 };
        let table = QuantTable::build(8, 32).unwrap();
        let stream = write_binary_stream(&[0; 8], &params, &table).unwrap();
        assert_eq!(stream.len(), HEADER_LEN + 1);
        assert_eq!(hex(&stream), "5149583101200800000008000000000000000000");
        let mut cache = TableCache::new();
        assert_eq!(read_stream(&stream, &mut cache).unwrap(), Decoded::Binary(vec![0; 8]));
    }

    #[test]
    fn prepare_bits_cases() {
        assert_eq!(prepare_bits(&[1, 1, 1, 0]), (Cow::Owned::<[u8]>(vec![0, 0, 0, 1]), true));
        // A tie keeps the original polarity.
        assert_eq!(prepare_bits(&[0, 0, 1, 1]).1, false);
        assert_eq!(prepare_bits(&[]).1, false);
        let (out, inv) = prepare_bits(&[1; 9]);
        assert!(inv);
        assert!(out.iter().all(|&b| b == 0));
    }

    #[test]
    fn dense_input_is_inverted_and_restored() {
        let params = StreamParams { g: 16, block_size: 32 };
        let bits: Vec<u8> = (0..100).map(|i| (i % 4 != 0) as u8).collect();
        roundtrip_binary(&bits, &params);
    }

    #[test]
    fn roundtrip_assorted_shapes() {
        let params = StreamParams { g: 32, block_size: 64 };
        for bits in [
            vec![],
            vec![0],
            vec![1],
            vec![0; 64],
            vec![1; 64],
            vec![0; 65],
            (0..1000).map(|i: u32| (i % 7 == 0) as u8).collect::<Vec<u8>>(),
        ] {
            roundtrip_binary(&bits, &params);
        }
    }

    #[test]
    fn streams_are_deterministic() {
        let params = StreamParams { g: 16, block_size: 128 };
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let bits: Vec<u8> = (0..500).map(|_| rng.random_range(0..2u8)).collect();
        let table = QuantTable::build(128, 16).unwrap();
        let a = write_binary_stream(&bits, &params, &table).unwrap();
        let b = write_binary_stream(&bits, &params, &table).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn payload_region_length_matches_independent_accounting() {
        let params = StreamParams { g: 32, block_size: 4096 };
        let table = QuantTable::build(4096, 32).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let bits: Vec<u8> = (0..8192).map(|_| (rng.random_range(0..8) == 0) as u8).collect();
        let (bits, _) = prepare_bits(&bits);
        let stream = write_binary_stream(&bits, &params, &table).unwrap();

        let classes: Vec<(usize, usize)> = bits
            .chunks(4096)
            .map(|c| (c.len(), c.iter().filter(|&&b| b == 1).count()))
            .collect();
        let (body_bits, tip_bits) = payload_bit_lengths(&classes, &table).unwrap();
        let k_field_bits: u64 = classes.iter().map(|&(m, _)| count_field_width(m) as u64).sum();
        let content_bits = HEADER_LEN as u64 * 8 + k_field_bits + body_bits + tip_bits;
        assert_eq!(stream.len() as u64, content_bits.div_ceil(8));
    }

    #[test]
    fn byte_mode_roundtrip() {
        let params = StreamParams { g: 32, block_size: 512 };
        let table = QuantTable::build(512, 32).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        for len in [0usize, 1, 200, 513, 1500] {
            let data: Vec<u8> = (0..len).map(|_| rng.random()).collect();
            let stream = write_byte_stream(&data, &params, &table).unwrap();
            let mut cache = TableCache::new();
            assert_eq!(read_stream(&stream, &mut cache).unwrap(), Decoded::Bytes(data));
        }
    }

    #[test]
    fn header_errors() {
        let params = StreamParams { g: 16, block_size: 16 };
        let table = QuantTable::build(16, 16).unwrap();
        let stream = write_binary_stream(&[1, 0, 1], &params, &table).unwrap();
        let mut cache = TableCache::new();

        let mut bad = stream.clone();
        bad[0] = b'X';
        assert_eq!(read_stream(&bad, &mut cache), Err(ContainerError::BadMagic));

        let mut bad = stream.clone();
        bad[4] = 9;
        assert_eq!(read_stream(&bad, &mut cache), Err(ContainerError::BadVersion(9)));

        let mut bad = stream.clone();
        bad[5] = 99;
        assert!(matches!(read_stream(&bad, &mut cache), Err(ContainerError::BadHeader(_))));

        let mut bad = stream.clone();
        bad[18] = 0xF0;
        assert!(matches!(read_stream(&bad, &mut cache), Err(ContainerError::BadHeader(_))));

        assert_eq!(read_stream(&stream[..10], &mut cache), Err(ContainerError::TruncatedStream));
    }

    #[test]
    fn every_truncation_errors() {
        let params = StreamParams { g: 16, block_size: 64 };
        let table = QuantTable::build(64, 16).unwrap();
        let bits: Vec<u8> = (0..300).map(|i: u32| (i % 3 == 0) as u8).collect();
        let stream = write_binary_stream(&bits, &params, &table).unwrap();
        let mut cache = TableCache::new();
        for cut in 0..stream.len() {
            assert!(
                read_stream(&stream[..cut], &mut cache).is_err(),
                "truncation at {cut} was accepted"
            );
        }
    }

    #[test]
    fn trailing_and_padding_are_rejected() {
        let params = StreamParams { g: 16, block_size: 16 };
        let table = QuantTable::build(16, 16).unwrap();
        let stream = write_binary_stream(&[1, 0, 1, 1, 0], &params, &table).unwrap();
        let mut cache = TableCache::new();

        let mut extra = stream.clone();
        extra.push(0);
        assert_eq!(read_stream(&extra, &mut cache), Err(ContainerError::TrailingData));
    }

    #[test]
    fn corrupted_streams_error_or_change_output() {
        let params = StreamParams { g: 16, block_size: 64 };
        let table = QuantTable::build(64, 16).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(33);
        let bits: Vec<u8> = (0..256).map(|_| (rng.random_range(0..4) == 0) as u8).collect();
        let stream = write_binary_stream(&bits, &params, &table).unwrap();
        let mut cache = TableCache::new();
        for _ in 0..300 {
            let mut bad = stream.clone();
            let pos = rng.random_range(0..bad.len() * 8);
            bad[pos / 8] ^= 1 << (pos % 8);
            match read_stream(&bad, &mut cache) {
                Err(_) => {}
                Ok(Decoded::Binary(out)) => {
                    assert_ne!(out, bits, "bit flip at {pos} decoded silently to the input")
                }
                Ok(_) => {}
            }
        }
    }

    #[test]
    fn parameter_validation() {
        let table = QuantTable::build(64, 16).unwrap();
        let bad = StreamParams { g: 32, block_size: 64 };
        assert_eq!(
            write_binary_stream(&[0], &bad, &table),
            Err(ContainerError::InconsistentParameters)
        );
        let bad = StreamParams { g: 16, block_size: 128 };
        assert_eq!(
            write_binary_stream(&[0], &bad, &table),
            Err(ContainerError::InconsistentParameters)
        );
    }
}
