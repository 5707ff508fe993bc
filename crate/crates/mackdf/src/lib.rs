//! Standard-library companion to `mackdf-core`: the `mackdf` command line,
//! the JSON known-answer runner, and the timing harness.

pub mod bench;
pub mod cli;
pub mod vectors;
