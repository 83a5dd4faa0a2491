//! Training, evaluation, diagnostics and the experiment runner for
//! location-to-channel models.

pub mod artifacts;
pub mod config;
pub mod data;
pub mod experiments;
pub mod manifest;
pub mod error;
pub mod metrics;
pub mod setup;
pub mod spectrum;
pub mod train;

pub use error::{ExperimentError, Result};
