//! Experiment harness for the `onlinerank` library: configuration,
//! seeded runs, parameter sweeps, result files and verification suites.
//!
//! The `onlinerank` binary is a thin command-line front end over this
//! crate.

pub mod config;
pub mod error;
pub mod output;
pub mod run;
pub mod sweep;
pub mod verify;

pub use error::{HarnessError, Result};
