//! Configuration and scenario runner behind the `optomech` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod run;

pub use config::{KeyValues, PeriodBasis, RunConfig, Scenario};
pub use run::{run, RunSummary, MANIFEST_FILE};
