//! Scenario runner, CSV/SVG output and command-line front end for
//! `chariot-core`.

pub mod config;
pub mod format;
pub mod grid;
pub mod scenario;
pub mod svg;

pub use config::ScenarioConfig;
pub use scenario::{
    execute, parse, run_config, run_scenario, Outcome, RunOptions, RunReport, ScenarioError,
};
pub use svg::{emit_svg_plot, PlotKind, Series};
