//! Files and commands around `relspec-core`: model, spectrum, recording,
//! dataset and report formats, run configurations, and the subcommands
//! behind the `relspec` binary.

pub mod commands;
pub mod config;
mod error;
pub mod formats;
pub mod json;

pub use error::{AppError, ExitCode};
