//! Criterion benchmarks for `bcf-core`; see `benches/core.rs`.
