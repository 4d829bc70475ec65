//! Criterion benchmarks for sympq; see `benches/`.
