//! Criterion benchmarks for the geometry kernel; see `benches/`.
