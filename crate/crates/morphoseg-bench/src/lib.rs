//! Benchmark-only crate; see `benches/segmenters.rs`.
