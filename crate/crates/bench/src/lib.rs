//! Criterion benchmarks for `shadowcut`; see `benches/pivot.rs`.
