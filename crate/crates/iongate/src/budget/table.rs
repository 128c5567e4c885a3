// Copyright 2026 IonGate Contributors
// SPDX-License-Identifier: Apache-2.0

use rayon::prelude::*;
use serde::Serialize;

use super::alpha::AlphaTable;
use super::formulas::{
    dephasing_error, heating_error, intensity_drift_error, scattering_error, spin_dephasing_error, thermal_error,
};
use super::noise::NoiseParams;
use super::scattering::{raman_coherence_factor, ScatteringModel};
use crate::error::{Error, Result};
use crate::gate::{carrier_lightshift_error, GateConfig};

/// Optical phases averaged over for the off-resonant entry.
pub const OFF_RESONANT_PHASES: usize = 64;

pub const CHANNELS: [&str; 7] = [
    "scattering",
    "motional_heating",
    "motional_dephasing",
    "spin_dephasing",
    "intensity_drift",
    "thermal",
    "off_resonant",
];

/// Per-channel errors and their sum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorBudget {
    pub entries: Vec<(String, f64)>,
    pub total: f64,
}

impl ErrorBudget {
    pub fn from_entries(entries: Vec<(String, f64)>) -> Result<Self> {
        if let Some((k, v)) = entries.iter().find(|(_, v)| !(*v >= 0.0)) {
            return Err(Error::InvalidParameter(format!("budget entry {k} is negative or NaN ({v})")));
        }
        let total = entries.iter().map(|(_, v)| v).sum();
        Ok(Self { entries, total })
    }

    pub fn get(&self, label: &str) -> Option<f64> {
        self.entries.iter().find(|(k, _)| k == label).map(|(_, v)| *v)
    }

    /// Rows grouped as in the published budget: heating and dephasing share one row.
    pub fn table_rows(&self) -> Vec<(&'static str, f64)> {
        let g = |k: &str| self.get(k).unwrap_or(0.0);
        vec![
            ("photon scattering", g("scattering")),
            ("motional heating and dephasing", g("motional_heating") + g("motional_dephasing")),
            ("spin dephasing", g("spin_dephasing")),
            ("intensity drift", g("intensity_drift")),
            ("motional temperature", g("thermal")),
            ("off-resonant", g("off_resonant")),
        ]
    }
}

/// Budget for one gate configuration. The scattering rates in `noise` apply at `cfg.t_g`.
pub fn budget_table(noise: &NoiseParams, cfg: &GateConfig, alphas: &AlphaTable) -> Result<ErrorBudget> {
    cfg.check()?;
    let errs = noise.validate("noise.");
    if !errs.is_empty() {
        return Err(Error::Validation(errs));
    }
    let t = cfg.t_g;
    let f = raman_coherence_factor(cfg)?;
    let off = carrier_lightshift_error(cfg, OFF_RESONANT_PHASES)?.mean;
    ErrorBudget::from_entries(vec![
        ("scattering".into(), scattering_error(noise.raman_rate, noise.rayleigh_deph_rate, t, f)),
        ("motional_heating".into(), heating_error(noise.heating_rate, t, cfg.loops)),
        ("motional_dephasing".into(), dephasing_error(noise.motional_tau, t, cfg.loops, alphas)?),
        ("spin_dephasing".into(), spin_dephasing_error(noise.spin_dephasing_coeff, t)),
        ("intensity_drift".into(), intensity_drift_error(noise.intensity_drift_frac)?),
        ("thermal".into(), thermal_error(cfg.eta_gate, noise.nbar_gate) + thermal_error(cfg.eta_spec, noise.nbar_spec)),
        ("off_resonant".into(), off),
    ])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelPoint {
    pub t_g: f64,
    pub budget: ErrorBudget,
}

/// Budgets over a family of gate durations at fixed K, with scattering rates from
/// `scattering` and all other inputs from `noise`.
pub fn model_curves(
    noise: &NoiseParams,
    cfg: &GateConfig,
    scattering: &ScatteringModel,
    alphas: &AlphaTable,
    t_gs: &[f64],
) -> Result<Vec<ModelPoint>> {
    t_gs.par_iter()
        .map(|&t| {
            let c = cfg.with_duration(t);
            let (raman_rate, rayleigh_deph_rate) = scattering.rates(t)?;
            let n = NoiseParams { raman_rate, rayleigh_deph_rate, ..noise.clone() };
            Ok(ModelPoint { t_g: t, budget: budget_table(&n, &c, alphas)? })
        })
        .collect()
}
