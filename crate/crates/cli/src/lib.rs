//! Batch front end for `riemreach`: scenario files in, CSV and JSON out.

pub mod config;
pub mod run;

pub use config::{ConfigError, Overrides, Scenario};
pub use run::{run_gvs, run_reach, run_validate, RunError, RunSummary};
