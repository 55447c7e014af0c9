//! Benchmark harness crate; see `benches/pipelines.rs`.
