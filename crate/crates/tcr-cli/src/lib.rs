//! Scenario ingestion, rendering and property suites for the `tcr` binary.

pub mod checks;
pub mod dot;
pub mod render;
pub mod scenario;

pub use scenario::{load_scenario, Scenario};
