//! Experiment configs, on-disk formats and command implementations behind
//! the `dqnn` binary.

pub mod config;
pub mod formats;
pub mod runner;
