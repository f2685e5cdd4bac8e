//! Criterion benchmarks for the classifier and the numerical diagnostics; see `benches/`.
