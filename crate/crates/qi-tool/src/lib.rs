//! Tooling around the `qi` library: a baseline binary range coder, the
//! benchmark harness comparing the two coders, deterministic input
//! generators, and the self-test suite behind `qi selftest`.

pub mod bench;
pub mod gen;
pub mod rangecoder;
pub mod selftest;
