//! Built-in submersions and end-to-end verification of the index equality.

pub mod fuzz;
pub mod models;
pub mod recipe;
pub mod verify;

pub use fuzz::{fuzz, random_scenario, reproduction_config, FuzzCase};
pub use recipe::{builtin, builtin_scenarios, BoundarySpec, ModelSpec, Scenario, SeedSpec, BUILTIN};
pub use verify::{run_scenario, verify_main_theorem, Check, InstantMatch, Residuals, ScenarioResult, MATCH_TOL};
