// Copyright 2026 IonGate Contributors
// SPDX-License-Identifier: Apache-2.0

//! Master-equation cross-checks of the closed-form channel errors.

use serde::Serialize;

use super::alpha::AlphaTable;
use super::formulas::{dephasing_error, heating_error, raman_error, rayleigh_error};
use super::noise::NoiseParams;
use super::scattering::raman_coherence_factor;
use crate::error::Result;
use crate::gate::{run_bell_sequence, GateConfig, SequenceOptions};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleCheck {
    pub label: String,
    pub numeric: f64,
    pub analytic: f64,
}

impl OracleCheck {
    /// numeric / analytic − 1.
    pub fn relative_deviation(&self) -> f64 {
        self.numeric / self.analytic - 1.0
    }
}

/// Bell error of a calibrated gate under `noise`, less its noise-free error.
pub fn numeric_channel_error(cfg: &GateConfig, noise: &NoiseParams, opts: &SequenceOptions) -> Result<f64> {
    let noisy = run_bell_sequence(cfg, noise, opts)?.bell_error();
    let clean = run_bell_sequence(cfg, &NoiseParams::zero(), opts)?.bell_error();
    Ok(noisy - clean)
}

pub fn heating_oracle(cfg: &GateConfig, heating_rate: f64, opts: &SequenceOptions) -> Result<OracleCheck> {
    let noise = NoiseParams { heating_rate, ..NoiseParams::zero() };
    Ok(OracleCheck {
        label: "motional_heating".into(),
        numeric: numeric_channel_error(cfg, &noise, opts)?,
        analytic: heating_error(heating_rate, cfg.t_g, cfg.loops),
    })
}

pub fn dephasing_oracle(
    cfg: &GateConfig,
    tau: f64,
    alphas: &AlphaTable,
    opts: &SequenceOptions,
) -> Result<OracleCheck> {
    let noise = NoiseParams { motional_tau: tau, ..NoiseParams::zero() };
    Ok(OracleCheck {
        label: "motional_dephasing".into(),
        numeric: numeric_channel_error(cfg, &noise, opts)?,
        analytic: dephasing_error(tau, cfg.t_g, cfg.loops, alphas)?,
    })
}

pub fn raman_oracle(cfg: &GateConfig, raman_rate: f64, opts: &SequenceOptions) -> Result<OracleCheck> {
    let noise = NoiseParams { raman_rate, ..NoiseParams::zero() };
    Ok(OracleCheck {
        label: "raman".into(),
        numeric: numeric_channel_error(cfg, &noise, opts)?,
        analytic: raman_error(raman_rate, cfg.t_g, raman_coherence_factor(cfg)?),
    })
}

pub fn rayleigh_oracle(cfg: &GateConfig, rayleigh_rate: f64, opts: &SequenceOptions) -> Result<OracleCheck> {
    let noise = NoiseParams { rayleigh_deph_rate: rayleigh_rate, ..NoiseParams::zero() };
    Ok(OracleCheck {
        label: "rayleigh".into(),
        numeric: numeric_channel_error(cfg, &noise, opts)?,
        analytic: rayleigh_error(rayleigh_rate, cfg.t_g),
    })
}
