//! Configuration files, report artifacts and the command-line driver.

pub mod expr;
pub mod app;
pub mod config;
pub mod report;

pub use app::main_with_args;
pub use config::{load_config, parse_config, OutputSpec, ResolvedRun, RunConfig};
