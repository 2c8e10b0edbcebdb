//! Benchmark harness: configuration, seeded trials and CSV traces.

pub mod bench;
pub mod bundled;
pub mod config;
pub mod error;

pub use bench::{run_bench, run_trial, splitmix64, trial_seed, BenchOutcome, Problem};
pub use config::{Args, BenchConfig};
pub use error::{CliError, Result};
