// Copyright 2026 IonGate Contributors
// SPDX-License-Identifier: Apache-2.0

//! Bell error after N gates inside one spin echo, with per-gate depolarizing error
//! and a coherent Rabi-frequency systematic.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{DMatrix, DVector, Matrix4};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::qdyn::C64;
use crate::spinecho::{ideal_gate, rotation, BELL_PULSE_PHASES};

/// Model N·ε_g + (π²/4)(N·δΩ/Ω)².
pub fn multi_gate_error(n_gates: u32, per_gate: f64, drift_frac: f64) -> f64 {
    let n = n_gates as f64;
    n * per_gate + PI * PI / 4.0 * (n * drift_frac).powi(2)
}

/// Phase-insensitive Bell fidelity: the larger of the even-parity and odd-parity
/// Bell overlaps maximised over the relative phase.
pub fn phase_free_fidelity(rho: &Matrix4<C64>) -> f64 {
    let even = (rho[(0, 0)].re + rho[(3, 3)].re + 2.0 * rho[(0, 3)].norm()) / 2.0;
    let odd = (rho[(1, 1)].re + rho[(2, 2)].re + 2.0 * rho[(1, 2)].norm()) / 2.0;
    even.max(odd)
}

/// Simulated Bell error after `n_gates` gates. Each gate applies the phase
/// (π/2)(1 + δ)² to anti-aligned states, then two-qubit depolarizing noise with
/// p = 4ε/3 so that one gate alone costs ε.
pub fn simulate_multi_gate(n_gates: u32, per_gate: f64, drift_frac: f64) -> Result<f64> {
    if n_gates == 0 || !(0.0..0.75).contains(&per_gate) {
        return Err(Error::InvalidParameter("need n_gates >= 1 and 0 <= per_gate < 0.75".into()));
    }
    let r = |angle: f64, k: usize| {
        let m = rotation(angle, BELL_PULSE_PHASES[k]);
        m.kronecker(&m)
    };
    let mut rho = Matrix4::<C64>::zeros();
    rho[(0, 0)] = C64::new(1.0, 0.0);
    let conj = |u: &Matrix4<C64>, rho: &Matrix4<C64>| u * rho * u.adjoint();
    rho = conj(&r(FRAC_PI_2, 0), &rho);
    let g = ideal_gate(FRAC_PI_2 * (1.0 + drift_frac).powi(2));
    let p = 4.0 * per_gate / 3.0;
    let mixed = Matrix4::<C64>::identity() * C64::new(0.25, 0.0);
    for _ in 0..n_gates {
        rho = conj(&g, &rho);
        rho = rho * C64::new(1.0 - p, 0.0) + mixed * C64::new(p, 0.0);
    }
    rho = conj(&r(PI, 1), &rho);
    rho = conj(&r(FRAC_PI_2, 2), &rho);
    Ok(1.0 - phase_free_fidelity(&rho))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadraticFit {
    pub constant: f64,
    pub linear: f64,
    pub quadratic: f64,
}

/// Least-squares fit ε(N) = a + bN + cN².
pub fn fit_quadratic(ns: &[f64], eps: &[f64]) -> Result<QuadraticFit> {
    if ns.len() != eps.len() || ns.len() < 3 {
        return Err(Error::InvalidParameter("quadratic fit needs at least three points".into()));
    }
    let a = DMatrix::from_fn(ns.len(), 3, |i, j| ns[i].powi(j as i32));
    let y = DVector::from_column_slice(eps);
    let sol = (a.transpose() * &a)
        .lu()
        .solve(&(a.transpose() * y))
        .ok_or_else(|| Error::Fit("singular quadratic fit".into()))?;
    Ok(QuadraticFit { constant: sol[0], linear: sol[1], quadratic: sol[2] })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultiGateStudy {
    pub n_gates: Vec<u32>,
    pub simulated: Vec<f64>,
    pub model: Vec<f64>,
    pub fit: QuadraticFit,
    /// (π²/4)δ², the quadratic coefficient expected from the systematic.
    pub predicted_quadratic: f64,
}

/// Odd gate counts 1, 3, …, up to `max_gates`.
pub fn multi_gate_study(max_gates: u32, per_gate: f64, drift_frac: f64) -> Result<MultiGateStudy> {
    let n_gates: Vec<u32> = (1..=max_gates).step_by(2).collect();
    let simulated =
        n_gates.iter().map(|&n| simulate_multi_gate(n, per_gate, drift_frac)).collect::<Result<Vec<_>>>()?;
    let model = n_gates.iter().map(|&n| multi_gate_error(n, per_gate, drift_frac)).collect();
    let ns: Vec<f64> = n_gates.iter().map(|&n| n as f64).collect();
    let fit = fit_quadratic(&ns, &simulated)?;
    Ok(MultiGateStudy { n_gates, simulated, model, fit, predicted_quadratic: PI * PI / 4.0 * drift_frac * drift_frac })
}
