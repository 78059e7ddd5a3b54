//! Criterion benchmarks for texpack live in `benches/`.
