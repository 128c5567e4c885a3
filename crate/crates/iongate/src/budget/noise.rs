// Copyright 2026 IonGate Contributors
// SPDX-License-Identifier: Apache-2.0

//! Error-channel rates and their Lindblad representations.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qdyn::{LindbladChannel, OperatorSet, C64};

/// Rates for every error channel in the budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseParams {
    /// Mean thermal occupation of the gate (centre-of-mass) mode.
    pub nbar_gate: f64,
    /// Mean thermal occupation of the spectator (stretch) mode.
    pub nbar_spec: f64,
    /// Gate-mode heating rate ṅ, quanta/s.
    pub heating_rate: f64,
    /// Motional coherence time τ, s. `f64::INFINITY` disables the channel.
    pub motional_tau: f64,
    /// Spin-echo contrast coefficient β, s⁻² (C = 1 − β t²).
    pub spin_dephasing_coeff: f64,
    /// Raman spin-flip scattering rate γ_R per ion, s⁻¹.
    pub raman_rate: f64,
    /// Rayleigh elastic dephasing rate γ_el per ion, s⁻¹.
    pub rayleigh_deph_rate: f64,
    /// Fractional Rabi-frequency systematic δΩ/Ω.
    pub intensity_drift_frac: f64,
    /// Use one common σz dephasing channel for both ions instead of independent ones.
    #[serde(default)]
    pub correlated_rayleigh: bool,
}

impl Default for NoiseParams {
    fn default() -> Self {
        Self::zero()
    }
}

impl NoiseParams {
    pub fn zero() -> Self {
        Self {
            nbar_gate: 0.0,
            nbar_spec: 0.0,
            heating_rate: 0.0,
            motional_tau: f64::INFINITY,
            spin_dephasing_coeff: 0.0,
            raman_rate: 0.0,
            rayleigh_deph_rate: 0.0,
            intensity_drift_frac: 0.0,
            correlated_rayleigh: false,
        }
    }

    pub fn validate(&self, prefix: &str) -> Vec<String> {
        let mut v = Vec::new();
        let nonneg = [
            ("nbar_gate", self.nbar_gate),
            ("nbar_spec", self.nbar_spec),
            ("heating_rate", self.heating_rate),
            ("spin_dephasing_coeff", self.spin_dephasing_coeff),
            ("raman_rate", self.raman_rate),
            ("rayleigh_deph_rate", self.rayleigh_deph_rate),
        ];
        for (name, x) in nonneg {
            if !(x >= 0.0) || !x.is_finite() {
                v.push(format!("{prefix}{name} must be finite and >= 0 (got {x})"));
            }
        }
        if !(self.motional_tau > 0.0) {
            v.push(format!("{prefix}motional_tau must be > 0 (got {})", self.motional_tau));
        }
        if !(self.intensity_drift_frac.abs() < 0.05) {
            v.push(format!("{prefix}intensity_drift_frac must satisfy |x| < 0.05 (got {})", self.intensity_drift_frac));
        }
        v
    }

    /// Lindblad channels active during the Raman gate pulses.
    pub fn channels(&self, ops: &OperatorSet) -> Result<Vec<LindbladChannel>> {
        let errs = self.validate("noise.");
        if !errs.is_empty() {
            return Err(Error::Validation(errs));
        }
        let r = |x: f64| C64::new(x, 0.0);
        let mut out = Vec::new();
        if self.heating_rate > 0.0 {
            let mode = ops.a.first().ok_or_else(|| Error::Dimension("heating needs a motional mode".into()))?;
            let s = r(self.heating_rate.sqrt());
            out.push(LindbladChannel::new(mode.scale(s), "heating-down"));
            out.push(LindbladChannel::new(ops.adag[0].scale(s), "heating-up"));
        }
        if self.motional_tau.is_finite() {
            let n = ops.num.first().ok_or_else(|| Error::Dimension("motional dephasing needs a mode".into()))?;
            out.push(LindbladChannel::new(n.scale(r((2.0 / self.motional_tau).sqrt())), "motional-dephasing"));
        }
        if self.raman_rate > 0.0 {
            let s = r(self.raman_rate.sqrt());
            for j in 0..ops.sp.len() {
                out.push(LindbladChannel::new(ops.sp[j].scale(s), format!("raman-up-{j}")));
                out.push(LindbladChannel::new(ops.sm[j].scale(s), format!("raman-down-{j}")));
            }
        }
        if self.rayleigh_deph_rate > 0.0 {
            let s = r((self.rayleigh_deph_rate / 2.0).sqrt());
            if self.correlated_rayleigh {
                let sum = ops.sz.iter().skip(1).fold(ops.sz[0].clone(), |acc, z| acc.add(z));
                out.push(LindbladChannel::new(sum.scale(s), "rayleigh-common"));
            } else {
                for j in 0..ops.sz.len() {
                    out.push(LindbladChannel::new(ops.sz[j].scale(s), format!("rayleigh-{j}")));
                }
            }
        }
        Ok(out)
    }
}
