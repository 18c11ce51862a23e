//! Parallel sweeps, benchmarks and report files for `qswitch-core`.
//!
//! The `qswitch` binary in this crate is a thin wrapper over [`cli::run`].

pub mod bench;
pub mod cli;
pub mod report;
pub mod sweep;

pub use qswitch_core as core;

/// Environment variable that overrides the worker-thread count.
pub const WORKERS_ENV: &str = "QSWITCH_WORKERS";

/// Seed used when a randomized command is run without `--seed`.
pub const DEFAULT_SEED: u64 = 42;
