//! Criterion benchmarks for the semantics engine; see `benches/`.
