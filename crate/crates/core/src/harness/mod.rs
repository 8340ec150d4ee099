//! Experiment orchestration behind the command-line tool: configuration,
//! the invariant suite, orbit caches, and CSV/JSON/plot-script outputs.

pub mod cache;
pub mod commands;
pub mod config;
pub mod verify;

use thiserror::Error;

pub use commands::{cmd_cache, cmd_constants, cmd_count, cmd_equidistribute, cmd_verify, load_or_search};
pub use config::{ExperimentConfig, SeedChain};
pub use verify::{run_verify, GroupOutcome, VerifyOptions, VerifyReport};

/// Failures of a harness command, each with its process exit code.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("invariant failure: {0}")]
    Invariant(String),
    #[error("resource limit reached: {0}")]
    Resource(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("unusable cache: {0}")]
    Cache(String),
    #[error(transparent)]
    Library(#[from] crate::Error),
}

impl HarnessError {
    /// 1 invariant failure, 2 configuration error, 3 resource abort.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) | HarnessError::Cache(_) => 2,
            HarnessError::Invariant(_) | HarnessError::Library(_) => 1,
            HarnessError::Resource(_) | HarnessError::Io(_) => 3,
        }
    }
}
