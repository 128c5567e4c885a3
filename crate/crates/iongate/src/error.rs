// Copyright 2026 IonGate Contributors
// SPDX-License-Identifier: Apache-2.0

//! Error type shared by all modules.

use thiserror::Error;

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("Hilbert space dimension {dim} exceeds ceiling {ceiling}")]
    DimensionOverflow { dim: usize, ceiling: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("integrator failure at t = {time:e} s: {reason}")]
    Integrator { time: f64, reason: String },

    #[error("Fock truncation inadequate at t = {time:e} s: top-level population {population:e}")]
    Truncation { time: f64, population: f64 },

    #[error("calibration failed: {0}")]
    Calibration(String),

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("configuration invalid:\n  {}", .0.join("\n  "))]
    Validation(Vec<String>),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serde(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Serde(e.to_string())
    }
}
