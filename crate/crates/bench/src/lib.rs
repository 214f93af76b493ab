//! Benchmark-only crate; see `benches/domains.rs`.
