//! Command-line experiments, file formats and parallel drivers for `cuspflow-core`.

pub mod cli;
pub mod config;
pub mod output;
pub mod parallel;
pub mod verify;
