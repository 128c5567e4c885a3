// Copyright 2026 IonGate Contributors
// SPDX-License-Identifier: Apache-2.0

//! Oscillating differential carrier light shift during the gate pulses.
//!
//! H_ls(t) = env(t)·(Ω_eff/2)·cos(2πδt + φ_opt + φ_pulse)·(σz¹ + σz²) commutes with the
//! force Hamiltonian, so each pulse adds the spin rotation exp(−iθ_k(σz¹ + σz²)/2)
//! with θ_k = Ω_eff ∫ env cos(·) dt.

use std::f64::consts::{FRAC_PI_4, PI};

use nalgebra::{Matrix4, Vector4};
use serde::Serialize;

use super::config::GateConfig;
use super::hamiltonian::GatePulse;
use super::plan::{bell_plan, EchoModel, Step};
use crate::error::{Error, Result};
use crate::numerics::{brent_root, Quadrature};
use crate::qdyn::C64;
use crate::spinecho::{bell_error_of, ideal_gate};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LightShiftResult {
    pub mean: f64,
    pub worst: f64,
    pub phases: Vec<f64>,
    pub errors: Vec<f64>,
}

/// Light-shift rotation angle θ accumulated during one pulse.
pub fn rotation_angle(cfg: &GateConfig, pulse: &GatePulse) -> f64 {
    let amp = cfg.carrier_reduction * cfg.lightshift_amp;
    if amp == 0.0 {
        return 0.0;
    }
    let f = cfg.raman_difference_freq();
    let w = 2.0 * PI * f;
    let phi = cfg.optical_phase + pulse.phase;
    let bp = pulse.shape.breakpoints();
    let mut total = 0.0;
    for seg in bp.windows(2) {
        let len = seg[1] - seg[0];
        if len <= 0.0 {
            continue;
        }
        let panels = ((4.0 * f * len).ceil() as usize).max(1);
        let q = Quadrature::new(pulse.start + seg[0], pulse.start + seg[1], panels, 8);
        total += q.integrate(|t| pulse.envelope(t) * (w * (t - pulse.clock_offset) + phi).cos());
    }
    amp * total
}

fn z_rotation(theta: f64) -> Matrix4<C64> {
    let z = [-1.0, 1.0];
    let d: Vec<C64> = (0..4).map(|i| C64::from_polar(1.0, -theta / 2.0 * (z[i >> 1] + z[i & 1]))).collect();
    Matrix4::from_diagonal(&Vector4::from_column_slice(&d))
}

/// Bell error from the light shift alone, with an ideal gate and ideal echo pulses.
pub fn lightshift_bell_error(cfg: &GateConfig) -> f64 {
    let plan = bell_plan(cfg, cfg.t_g, &EchoModel::Ideal);
    let mut u = Matrix4::<C64>::identity();
    for step in &plan.steps {
        u = match step {
            Step::Spin { unitary, .. } => unitary * u,
            Step::Gate(p) => z_rotation(rotation_angle(cfg, p)) * ideal_gate(FRAC_PI_4) * u,
        };
    }
    bell_error_of(&u)
}

/// Light-shift error over `n_phases` optical phases evenly spaced on [0, 2π).
pub fn carrier_lightshift_error(cfg: &GateConfig, n_phases: usize) -> Result<LightShiftResult> {
    cfg.check()?;
    if n_phases == 0 {
        return Err(Error::InvalidParameter("n_phases must be >= 1".into()));
    }
    let phases: Vec<f64> = (0..n_phases).map(|k| 2.0 * PI * k as f64 / n_phases as f64).collect();
    let errors: Vec<f64> =
        phases.iter().map(|&p| lightshift_bell_error(&GateConfig { optical_phase: p, ..cfg.clone() })).collect();
    let mean = errors.iter().sum::<f64>() / n_phases as f64;
    let worst = errors.iter().copied().fold(0.0, f64::max);
    Ok(LightShiftResult { mean, worst, phases, errors })
}

/// Ω_ls giving a phase-averaged error `target` for `cfg` (pulse shape as configured).
pub fn calibrate_lightshift_amp(cfg: &GateConfig, target: f64, n_phases: usize) -> Result<f64> {
    if !(target > 0.0 && target < 0.5) {
        return Err(Error::InvalidParameter(format!("light-shift target must lie in (0, 0.5) (got {target})")));
    }
    let mean_at = |amp: f64| -> f64 {
        carrier_lightshift_error(&GateConfig { lightshift_amp: amp, ..cfg.clone() }, n_phases)
            .map(|r| r.mean)
            .unwrap_or(f64::NAN)
    };
    let mut hi = 1e5;
    while mean_at(hi) < target {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::Calibration("light-shift error never reaches the target".into()));
        }
    }
    brent_root(|a| mean_at(a) - target, 0.0, hi, 1e-9 * hi, 200)
}
