//! Experiment runner for the `itoprop` propagators.
//!
//! A run reads a flat `key = value` config ([`config`]), sweeps time steps
//! (and pulse areas for the interferometry model) in parallel, and writes one
//! CSV per sweep point, a `summary.csv` and a `manifest.json`. `compare` does
//! the same for several methods and adds an error against wall-time frontier;
//! `validate` runs the property checks in [`validate`].

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod experiment;
pub mod report;
pub mod validate;

pub use commands::{compare, run, Options, Report};
pub use config::{ExperimentConfig, Method, System};
pub use error::CliError;
pub use validate::{validate, ValidateOptions, ValidationReport};
