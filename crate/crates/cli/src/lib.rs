//! Command-line front end for `subqsl-core`: configuration files, instance
//! construction, report and trace files, and the `verify` check table.

pub mod app;
pub mod config;
pub mod error;
pub mod formats;
pub mod instances;
pub mod output;
pub mod run;
pub mod verify;

pub use app::run_cli;
