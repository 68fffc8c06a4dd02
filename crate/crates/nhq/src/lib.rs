//! Scenario files, runner and time-series output for `nhq-core`.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod config;
pub mod error;
pub mod executor;
pub mod output;
pub mod scenario;

pub use config::{validate_config, ScenarioConfig, Violation};
pub use error::CliError;
pub use scenario::{run_scenario, Scenario};
