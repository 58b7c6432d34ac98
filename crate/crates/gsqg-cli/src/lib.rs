//! Command-line front end for the gSQG pseudo-spectral simulator: run
//! orchestration, property verification and parameter sweeps, with JSON/CSV
//! artifacts and a compact binary snapshot format.

// Negated comparisons like `!(x > 0.0)` are load-bearing: they reject NaN,
// which `x <= 0.0` would accept.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod runner;
pub mod snapshot;
pub mod sweep;
pub mod verify;

use thiserror::Error;

/// Environment variable naming the default output root directory.
pub const OUTPUT_ROOT_ENV: &str = "GSQG_OUTPUT_ROOT";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),

    #[error("snapshot error: {0}")]
    Snapshot(String),

    #[error(transparent)]
    Core(#[from] gsqg_core::Error),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}
