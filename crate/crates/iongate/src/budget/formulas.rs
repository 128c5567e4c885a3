// Copyright 2026 IonGate Contributors
// SPDX-License-Identifier: Apache-2.0

//! Closed-form error estimates for each channel.

use std::f64::consts::PI;

use super::alpha::AlphaTable;
use crate::error::{Error, Result};

const PI2_4: f64 = PI * PI / 4.0;

/// Thermal-motion error (π²/4)η⁴n̄(2n̄+1).
pub fn thermal_error(eta: f64, nbar: f64) -> f64 {
    PI2_4 * eta.powi(4) * nbar * (2.0 * nbar + 1.0)
}

/// Heating error ṅ t_g / (2K).
pub fn heating_error(heating_rate: f64, t_g: f64, loops: u32) -> f64 {
    heating_rate * t_g / (2.0 * loops as f64)
}

/// Motional dephasing error α_K t_g / τ. Fails when K is not tabulated.
pub fn dephasing_error(motional_tau: f64, t_g: f64, loops: u32, alphas: &AlphaTable) -> Result<f64> {
    if motional_tau.is_infinite() {
        return Ok(0.0);
    }
    let a = alphas.get(loops).ok_or_else(|| {
        Error::InvalidParameter(format!("no α_K for K = {loops}; compute it with alpha::alpha_numeric"))
    })?;
    Ok(a * t_g / motional_tau)
}

/// Parity-contrast loss ΔC mapped to Bell error ΔC/2.
pub fn contrast_loss_error(contrast: f64) -> f64 {
    (1.0 - contrast) / 2.0
}

/// Spin-dephasing error from the single-ion echo contrast C = 1 − βt²:
/// two-ion contrast C², error (1 − C²)/2.
pub fn spin_dephasing_error(beta: f64, t_g: f64) -> f64 {
    let c = 1.0 - beta * t_g * t_g;
    contrast_loss_error(c * c)
}

/// β giving spin-dephasing error `target` at `t_g`.
pub fn spin_dephasing_beta(target: f64, t_g: f64) -> Result<f64> {
    if !(0.0..0.5).contains(&target) {
        return Err(Error::InvalidParameter(format!("target must lie in [0, 0.5) (got {target})")));
    }
    Ok((1.0 - (1.0 - 2.0 * target).sqrt()) / (t_g * t_g))
}

/// Raman spin-flip error 2γ_R t f̄ for both ions, where f̄ is the coherence factor.
pub fn raman_error(raman_rate: f64, t_eff: f64, coherence_factor: f64) -> f64 {
    2.0 * raman_rate * t_eff * coherence_factor
}

/// Rayleigh dephasing error through the contrast map: two-ion contrast e^{−2γt}.
pub fn rayleigh_error(rayleigh_rate: f64, t_eff: f64) -> f64 {
    contrast_loss_error((-2.0 * rayleigh_rate * t_eff).exp())
}

/// Raman plus Rayleigh scattering error.
pub fn scattering_error(raman_rate: f64, rayleigh_rate: f64, t_eff: f64, coherence_factor: f64) -> f64 {
    raman_error(raman_rate, t_eff, coherence_factor) + rayleigh_error(rayleigh_rate, t_eff)
}

/// Geometric-phase miscalibration error (π²/4)(δΩ/Ω)².
pub fn intensity_drift_error(drift_frac: f64) -> Result<f64> {
    if !(drift_frac.abs() < 0.05) {
        return Err(Error::InvalidParameter(format!("|drift| must be < 0.05 (got {drift_frac})")));
    }
    Ok(PI2_4 * drift_frac * drift_frac)
}

/// Addressing cross-talk error (π²/4)(Ω′/Ω)².
pub fn crosstalk_error(rabi_off_null: f64, rabi_on_null: f64) -> Result<f64> {
    if !(rabi_on_null > 0.0) {
        return Err(Error::InvalidParameter(format!("Ω on the null must be > 0 (got {rabi_on_null})")));
    }
    Ok(PI2_4 * (rabi_off_null / rabi_on_null).powi(2))
}
