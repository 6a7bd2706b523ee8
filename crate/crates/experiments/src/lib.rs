//! Seeded experiment driver for `wassknn`.
//!
//! A run is a pure function of its [`ExperimentConfig`]: [`run`] returns the
//! CSV bytes, and the same configuration yields the same bytes for any number
//! of worker threads. [`summarize`] turns a risk CSV into per-`n` aggregates.

pub mod config;
pub mod error;
pub mod suites;
pub mod summary;
pub mod table;

pub use config::{ExperimentConfig, Suite};
pub use error::{Error, Result};
pub use suites::run;
pub use summary::summarize;

/// Environment variable capping the number of worker threads.
pub const THREADS_VAR: &str = "WASSKNN_THREADS";

/// Parses a [`THREADS_VAR`] value.
pub fn parse_threads(value: &str) -> Result<usize> {
    match value.trim().parse::<usize>() {
        Ok(n) if n >= 1 => Ok(n),
        _ => Err(Error::Usage(format!("{THREADS_VAR} must be a positive integer, got `{value}`"))),
    }
}

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/experiments.md")]
pub struct ExperimentsChapter;
