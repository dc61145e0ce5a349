//! Criterion benchmarks for the numerical core; see `benches/solver.rs`.
