//! Criterion benchmarks for the residual engine and the solvers; see `benches/`.
