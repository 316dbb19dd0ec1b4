//! Benchmarks live under `benches/`; see `cargo bench -p pqst-bench`.
