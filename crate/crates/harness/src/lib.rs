//! Experiment runner for `braidflow`.
//!
//! Each subcommand runs one campaign from a TOML configuration and produces a
//! [`report::Outcome`]: a JSON report with pass/fail checks and fitted
//! constants, plus CSV tables. Results depend only on the configuration and
//! the seed, never on the number of worker threads.

use thiserror::Error;

pub mod campaigns;
pub mod config;
pub mod fit;
pub mod report;
pub mod scenario;

pub use campaigns::{run, Command};
pub use config::Config;
pub use report::Outcome;

#[derive(Debug, Error)]
pub enum HarnessError {
    /// Bad configuration or arguments; nothing has run.
    #[error("configuration error: {0}")]
    Config(String),
    /// A campaign could not complete.
    #[error("run failed: {0}")]
    Runtime(String),
}

/// Process exit codes.
pub mod exit {
    pub const PASS: i32 = 0;
    pub const CHECK_FAILED: i32 = 1;
    pub const USAGE: i32 = 2;
}
