// Copyright 2026 IonGate Contributors
// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ShapeKind {
    #[default]
    Rectangular,
    SmoothRamp,
}

/// Order of the spin-motion coupling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum LambDicke {
    /// X = η a.
    #[default]
    FirstOrder,
    /// ⟨n|X|n+1⟩ = e^{−η²/2} η L_n^1(η²)/√(n+1).
    Full,
}

/// Parameters of the two-ion σz⊗σz gate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateConfig {
    /// Lamb-Dicke parameter of the centre-of-mass mode.
    pub eta_gate: f64,
    /// Lamb-Dicke parameter of the stretch mode.
    pub eta_spec: f64,
    /// Force drive strength Ω, rad/s.
    pub rabi: f64,
    /// Gate detuning δ_g, Hz.
    pub delta_g: f64,
    /// Number of phase-space loops K.
    pub loops: u32,
    /// Gate duration t_g = K/δ_g, s.
    pub t_g: f64,
    /// Pulse-shape characteristic time, s.
    pub ramp_time: f64,
    #[serde(default)]
    pub shape: ShapeKind,
    /// Oscillating differential carrier light-shift amplitude Ω_ls, rad/s.
    pub lightshift_amp: f64,
    /// Optical phase φ_opt, rad.
    pub optical_phase: f64,
    /// Carrier Rabi-frequency reduction factor.
    pub carrier_reduction: f64,
    /// Raman detuning Δ, Hz. Metadata only.
    pub raman_detuning_meta: f64,
    /// Axial centre-of-mass frequency f_z, Hz.
    pub axial_freq: f64,
    #[serde(default)]
    pub lamb_dicke: LambDicke,
    /// Fractional correction to the force detuning, set by two-parameter calibration.
    #[serde(default)]
    pub detuning_trim: f64,
}

impl GateConfig {
    /// Gate of duration `t_g` with `loops` loops, default apparatus values and the
    /// first-order coherent-state Rabi estimate.
    pub fn new(t_g: f64, loops: u32) -> Self {
        let mut cfg = Self {
            eta_gate: 0.123,
            eta_spec: 0.094,
            rabi: 0.0,
            delta_g: loops as f64 / t_g,
            loops,
            t_g,
            ramp_time: 1.5e-6,
            shape: ShapeKind::Rectangular,
            lightshift_amp: 0.0,
            optical_phase: 0.0,
            carrier_reduction: 0.83,
            raman_detuning_meta: -3.0e12,
            axial_freq: 1.95e6,
            lamb_dicke: LambDicke::FirstOrder,
            detuning_trim: 0.0,
        };
        cfg.rabi = cfg.seed_rabi();
        cfg
    }

    /// Ω giving a π/2 differential phase for rectangular first-order pulses: πδ_g/(η√K).
    pub fn seed_rabi(&self) -> f64 {
        PI * self.delta_g / (self.eta_gate * (self.loops as f64).sqrt())
    }

    /// Angular force detuning 2πδ_g(1 + trim), rad/s.
    pub fn delta_angular(&self) -> f64 {
        2.0 * PI * self.delta_g * (1.0 + self.detuning_trim)
    }

    /// Raman difference frequency f_z + δ_g, Hz.
    pub fn raman_difference_freq(&self) -> f64 {
        self.axial_freq + self.delta_g
    }

    /// Same gate rescaled to a new duration at fixed K, with the Rabi estimate rescaled.
    pub fn with_duration(&self, t_g: f64) -> Self {
        let mut c = self.clone();
        let scale = self.t_g / t_g;
        c.t_g = t_g;
        c.delta_g = self.loops as f64 / t_g;
        c.rabi = self.rabi * scale;
        c
    }

    pub fn validate(&self, prefix: &str) -> Vec<String> {
        let mut v = Vec::new();
        for (name, eta) in [("eta_gate", self.eta_gate), ("eta_spec", self.eta_spec)] {
            if !(eta > 0.0 && eta < 1.0) {
                v.push(format!("{prefix}{name} must lie in (0, 1) (got {eta})"));
            }
        }
        if self.loops == 0 {
            v.push(format!("{prefix}loops must be >= 1"));
        }
        if !(self.t_g > 0.0 && self.t_g.is_finite()) {
            v.push(format!("{prefix}t_g must be > 0 (got {})", self.t_g));
        }
        if !(self.delta_g > 0.0) {
            v.push(format!("{prefix}delta_g must be > 0 (got {})", self.delta_g));
        } else if (self.t_g * self.delta_g - self.loops as f64).abs() > 1e-9 * self.loops.max(1) as f64 {
            v.push(format!("{prefix}t_g * delta_g = {} must equal loops = {}", self.t_g * self.delta_g, self.loops));
        }
        if !(self.rabi >= 0.0 && self.rabi.is_finite()) {
            v.push(format!("{prefix}rabi must be finite and >= 0 (got {})", self.rabi));
        }
        if !(self.ramp_time >= 0.0 && self.ramp_time < self.t_g / 2.0) {
            v.push(format!("{prefix}ramp_time must lie in [0, t_g/2) (got {})", self.ramp_time));
        }
        if !(self.lightshift_amp >= 0.0 && self.lightshift_amp.is_finite()) {
            v.push(format!("{prefix}lightshift_amp must be finite and >= 0 (got {})", self.lightshift_amp));
        }
        if !(self.carrier_reduction > 0.0 && self.carrier_reduction <= 1.0) {
            v.push(format!("{prefix}carrier_reduction must lie in (0, 1] (got {})", self.carrier_reduction));
        }
        if !self.optical_phase.is_finite() {
            v.push(format!("{prefix}optical_phase must be finite"));
        }
        if !(self.axial_freq > 0.0) {
            v.push(format!("{prefix}axial_freq must be > 0 (got {})", self.axial_freq));
        }
        if !(self.detuning_trim.abs() < 0.5) {
            v.push(format!("{prefix}detuning_trim must satisfy |x| < 0.5 (got {})", self.detuning_trim));
        }
        v
    }

    pub fn check(&self) -> Result<()> {
        let v = self.validate("gate.");
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(v))
        }
    }
}
