//! Experiment driver library; see the binary for the command-line surface.

pub mod commands;
pub mod config;
pub mod cost;
pub mod csvio;
pub mod error;
pub mod metrics;
pub mod mixture;
pub mod sweep;

pub use commands::{build_problem, run, BuiltProblem, Cli};
pub use config::{Problem, RunConfig};
pub use error::CliError;
pub use metrics::{error_metrics, ErrorReport};
pub use sweep::{grid_times, sweep, SweepRow};
