//! Benchmarks for the detection pipeline live in `benches/`.
