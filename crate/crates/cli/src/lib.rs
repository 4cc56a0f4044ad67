//! Command-line front end: time-domain simulation, spectra, analytic
//! comparison and parameter sweeps, written as CSV tables and SVG plots.

pub mod analysis;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use config::RunConfig;
pub use error::{CliError, Result};
