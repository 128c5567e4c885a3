// Copyright 2026 IonGate Contributors
// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parity P↓↓ + P↑↑ − P↓↑ − P↑↓ of populations ordered [↓↓, ↓↑, ↑↓, ↑↑].
pub fn parity(populations: [f64; 4]) -> Result<f64> {
    let sum: f64 = populations.iter().sum();
    if (sum - 1.0).abs() > 1e-9 || populations.iter().any(|p| !p.is_finite()) {
        return Err(Error::InvalidParameter(format!("populations must sum to 1 (sum = {sum})")));
    }
    Ok(populations[0] + populations[3] - populations[1] - populations[2])
}

/// A measured quantity with its standard error.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Measured {
    pub value: f64,
    #[serde(default)]
    pub err: f64,
}

impl Measured {
    pub fn new(value: f64, err: f64) -> Self {
        Self { value, err }
    }

    pub fn exact(value: f64) -> Self {
        Self { value, err: 0.0 }
    }
}

/// Corrections applied when composing the fidelity.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Corrections {
    /// SPAM error already removed from the populations by map inversion.
    pub spam: Option<f64>,
    /// Spin-echo sequence error subtracted from 1 − F to give the gate error.
    pub se: Option<Measured>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelityResult {
    pub fidelity: f64,
    pub fidelity_err: f64,
    pub contrast: f64,
    pub psum: f64,
    pub corrected_for: Vec<(String, f64)>,
    pub gate_error: f64,
    pub gate_error_err: f64,
    pub warnings: Vec<String>,
}

/// F = (C + P↓↓ + P↑↑)/2 and ε_g = 1 − F − ε_SE with errors added in quadrature.
pub fn bell_fidelity(contrast: Measured, psum: Measured, corrections: Corrections) -> FidelityResult {
    let fidelity = 0.5 * (contrast.value + psum.value);
    let fidelity_err = 0.5 * contrast.err.hypot(psum.err);
    let mut corrected_for = Vec::new();
    let mut warnings = Vec::new();
    if !(0.0..=1.0).contains(&contrast.value) || !(0.0..=1.0).contains(&psum.value) {
        warnings.push(format!("inputs outside [0, 1]: C = {}, Psum = {}", contrast.value, psum.value));
    }
    if let Some(spam) = corrections.spam {
        corrected_for.push(("spam".to_string(), spam));
    }
    let se = corrections.se.unwrap_or_default();
    if corrections.se.is_some() {
        corrected_for.push(("spin_echo".to_string(), se.value));
    }
    let gate_error = 1.0 - fidelity - se.value;
    if gate_error < 0.0 {
        warnings.push(format!("nonphysical negative gate error {gate_error:.3e}"));
    }
    FidelityResult {
        fidelity,
        fidelity_err,
        contrast: contrast.value,
        psum: psum.value,
        corrected_for,
        gate_error,
        gate_error_err: fidelity_err.hypot(se.err),
        warnings,
    }
}
