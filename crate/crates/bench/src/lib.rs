//! Benchmarks for the laboratory live in `benches/`.
