//! Scenario runner behind the `bvchain` binary.
//!
//! A scenario file describes a chain, an initial state, the solver paths to run
//! and the comparisons between them. [`run_scenario`] evaluates every path on a
//! shared time grid; [`write_outputs`] writes the series, the comparison report
//! and plot data.

pub mod config;
pub mod error;
pub mod output;
pub mod run;
pub mod scenarios;

pub use config::ScenarioConfig;
pub use error::CliError;
pub use output::{emit_plotdata, write_outputs, PlotManifest};
pub use run::{run_scenario, validate_scenario, ComparisonReport, ScenarioRun, Series};

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/cli.md")]
mod book_cli {}
