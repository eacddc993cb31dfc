//! Benchmark-only crate; see `benches/dickson.rs`. Run with `cargo bench`.
