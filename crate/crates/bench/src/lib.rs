//! Benchmark-only crate; see `benches/exact.rs`.
