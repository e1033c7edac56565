//! Quantized-indexing entropy coding.
//!
//! This crate implements enumerative coding over binomial path counts with the
//! counts replaced by *sliding-window integers*: integers of the form `w * 2^s`
//! whose mantissa `w` is limited to `g` bits. Quantizing the count tables this
//! way caps the arithmetic precision of the coder at `g` bits per operation
//! (instead of precision proportional to the output size) while keeping the
//! index arithmetic integer-exact and the code uniquely decodable.
//!
//! The main pieces:
//!
//! - [`swi`] — the sliding-window integer type and its ceiling rounding.
//! - [`qtable`] — quantized binomial addend tables built front by front.
//! - [`codec`] — the binary block encoder/decoder (colex ranking) plus the
//!   16-bit tip split used to pack block boundaries.
//! - [`radix`] — quantized mixed-radix and permutation codes.
//! - [`multialpha`] — coding of alphabets larger than two by factoring the
//!   symbol stream through a binary code tree.
//! - [`oracle`] — exact big-integer enumerative coding, used as ground truth
//!   by the tests and by the table redundancy reports.
//! - [`container`] — the `QIX1` byte stream format tying it all together.
//!
//! Everything here is deterministic: the same input and parameters produce
//! byte-identical streams on every platform. All types are immutable after
//! construction and safe to share across threads.

pub mod codec;
pub mod container;
pub mod multialpha;
pub mod oracle;
pub mod qtable;
pub mod radix;
pub mod swi;

pub use codec::{decode_block, encode_block, merge_tip, split_tip, BitAccumulator, BlockCode, CodecError};
pub use container::{
    prepare_bits, read_stream, write_binary_stream, write_byte_stream, ContainerError, Decoded,
    StreamParams, TableCache,
};
pub use multialpha::{build_tree, decode_multi, encode_multi, CodeTree, MultiAlphaError};
pub use oracle::{binom, multinomial, rank_exact, unrank_exact, BinomialTable, OracleError};
pub use qtable::{
    log_factorials, min_precision, QuantTable, RedundancyReport, ShiftReconstructor, TableError,
};
pub use radix::{perm_rank, perm_unrank, radix_decode, radix_encode, PermTable, RadixError, RadixTable};
pub use swi::{sw_ceil, sw_ceil_u128, sw_mul_ceil, sw_sum_ceil, SwInt, MAX_PRECISION, MIN_PRECISION};

// Big integers appear throughout the public API (exact counts, block indices).
pub use num_bigint::BigUint;
