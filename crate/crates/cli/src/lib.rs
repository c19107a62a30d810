//! Command-line front end for `cylobst`: configuration, pipelines and the
//! verification suite.

pub mod config;
pub mod run;

pub use config::{parse_config, ConfigError, GridSpec, Problem, RunConfig, Tolerances};
pub use run::{run, Check, Outcome, RunError, Stage};
