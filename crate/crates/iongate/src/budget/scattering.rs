// Copyright 2026 IonGate Contributors
// SPDX-License-Identifier: Apache-2.0

//! Photon-scattering error: coherence factor of the Raman channel, anchor calibration
//! and the scattering-rate table used when t_g is varied at constant beam power.

use nalgebra::Matrix4;
use serde::{Deserialize, Serialize};

use super::formulas::{rayleigh_error, scattering_error};
use crate::error::{Error, Result};
use crate::gate::coherent::CoherentState;
use crate::gate::hamiltonian::FORCE_SIGNS;
use crate::gate::{bell_plan, EchoModel, GateConfig, LambDicke, PulseShape, ShapeKind, Step};
use crate::numerics::Quadrature;
use crate::qdyn::C64;

fn sigma(j: usize, raise: bool) -> Matrix4<C64> {
    let mut m = Matrix4::<C64>::zeros();
    for s in 0..4 {
        let bit = if j == 0 { 2 } else { 1 };
        if raise && s & bit == 0 {
            m[(s | bit, s)] = C64::new(1.0, 0.0);
        }
        if !raise && s & bit != 0 {
            m[(s & !bit, s)] = C64::new(1.0, 0.0);
        }
    }
    m
}

fn run_steps(st: &mut CoherentState, cfg: &GateConfig, steps: &[Step]) {
    for step in steps {
        match step {
            Step::Spin { unitary, .. } => st.apply_spin(unitary),
            Step::Gate(p) => st.apply_pulse(cfg, p, cfg.rabi, 0.0),
        }
    }
}

/// First-order Raman-scattering weight: with one σ± channel of rate γ_R per ion and
/// direction, the Bell error is 2γ_R t_g f̄, where
/// f̄ = ⟨1 − ½ Σ_jumps F_jump(t)⟩ over the Raman pulses and F_jump is the Bell fidelity
/// reached if that jump occurs at t and the sequence then completes. Evaluated on the
/// closed-form trajectory (rectangular, first-order pulses).
pub fn raman_coherence_factor(cfg: &GateConfig) -> Result<f64> {
    cfg.check()?;
    let c = GateConfig { shape: ShapeKind::Rectangular, lamb_dicke: LambDicke::FirstOrder, ..cfg.clone() };
    let plan = bell_plan(&c, c.t_g, &EchoModel::Ideal);
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let jumps: Vec<Matrix4<C64>> = (0..2).flat_map(|j| [sigma(j, true), sigma(j, false)]).collect();
    let mut st = CoherentState::new([one, zero, zero, zero], FORCE_SIGNS);
    let mut integral = 0.0;
    let mut total_t = 0.0;
    for (k, step) in plan.steps.iter().enumerate() {
        match step {
            Step::Spin { unitary, .. } => st.apply_spin(unitary),
            Step::Gate(p) => {
                let d = p.shape.duration;
                let q = Quadrature::new(0.0, d, 16, 8);
                integral += q.integrate(|tau| {
                    let mut s = st.clone();
                    let mut head = *p;
                    head.shape = PulseShape::rectangular(tau);
                    s.apply_pulse(&c, &head, c.rabi, 0.0);
                    let mut tail = *p;
                    tail.start = p.start + tau;
                    tail.shape = PulseShape::rectangular(d - tau);
                    let f_jump: f64 = jumps
                        .iter()
                        .map(|l| {
                            let mut b = s.clone();
                            b.apply_spin(l);
                            b.apply_pulse(&c, &tail, c.rabi, 0.0);
                            run_steps(&mut b, &c, &plan.steps[k + 1..]);
                            let r = b.spin_density();
                            0.5 * (r[(0, 0)] + r[(3, 3)] + r[(0, 3)] + r[(3, 0)]).re
                        })
                        .sum();
                    1.0 - 0.5 * f_jump
                });
                total_t += d;
                st.apply_pulse(&c, p, c.rabi, 0.0);
            }
        }
    }
    if total_t <= 0.0 {
        return Err(Error::InvalidParameter("no Raman illumination in the sequence".into()));
    }
    Ok(integral / total_t)
}

/// Per-ion rates (γ_R, γ_el) that reproduce `total` scattering error at `t_g`,
/// with `raman_fraction` of it from Raman scattering.
pub fn anchor_rates(total: f64, raman_fraction: f64, t_g: f64, coherence_factor: f64) -> Result<(f64, f64)> {
    if !(total > 0.0 && total < 0.5 && (0.0..=1.0).contains(&raman_fraction) && t_g > 0.0 && coherence_factor > 0.0) {
        return Err(Error::InvalidParameter("invalid scattering anchor".into()));
    }
    let raman = raman_fraction * total / (2.0 * t_g * coherence_factor);
    let rayleigh = -(1.0 - 2.0 * (1.0 - raman_fraction) * total).ln() / (2.0 * t_g);
    Ok((raman, rayleigh))
}

/// Scattering rates at one gate duration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatePoint {
    pub t_g: f64,
    pub raman_rate: f64,
    pub rayleigh_rate: f64,
}

/// Scattering rates against t_g, interpolated linearly in log-log coordinates and
/// extrapolated with the end slopes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScatteringModel {
    pub points: Vec<RatePoint>,
}

impl ScatteringModel {
    /// Table following rate ∝ 1/t_g² through the anchor, the scaling at constant
    /// power when δ_g and Ω both follow 1/t_g.
    pub fn power_law(anchor: RatePoint, t_gs: &[f64]) -> Self {
        let points = t_gs
            .iter()
            .map(|&t| {
                let s = (anchor.t_g / t).powi(2);
                RatePoint { t_g: t, raman_rate: anchor.raman_rate * s, rayleigh_rate: anchor.rayleigh_rate * s }
            })
            .collect();
        Self { points }
    }

    pub fn validate(&self, prefix: &str) -> Vec<String> {
        let mut v = Vec::new();
        if self.points.is_empty() {
            v.push(format!("{prefix}points must not be empty"));
        }
        for (i, p) in self.points.iter().enumerate() {
            if !(p.t_g > 0.0 && p.raman_rate > 0.0 && p.rayleigh_rate > 0.0) {
                v.push(format!("{prefix}points[{i}] needs t_g, raman_rate and rayleigh_rate > 0"));
            }
            if i > 0 && !(p.t_g > self.points[i - 1].t_g) {
                v.push(format!("{prefix}points must be sorted by strictly increasing t_g"));
            }
        }
        v
    }

    /// (γ_R, γ_el) at `t_g`.
    pub fn rates(&self, t_g: f64) -> Result<(f64, f64)> {
        let errs = self.validate("scattering.");
        if !errs.is_empty() {
            return Err(Error::Validation(errs));
        }
        let p = &self.points;
        if p.len() == 1 {
            return Ok((p[0].raman_rate, p[0].rayleigh_rate));
        }
        let k = match p.iter().position(|q| q.t_g >= t_g) {
            Some(0) => 1,
            Some(k) => k,
            None => p.len() - 1,
        };
        let (a, b) = (&p[k - 1], &p[k]);
        let u = (t_g.ln() - a.t_g.ln()) / (b.t_g.ln() - a.t_g.ln());
        let lerp = |x: f64, y: f64| (x.ln() + u * (y.ln() - x.ln())).exp();
        Ok((lerp(a.raman_rate, b.raman_rate), lerp(a.rayleigh_rate, b.rayleigh_rate)))
    }

    pub fn error(&self, t_g: f64, coherence_factor: f64) -> Result<f64> {
        let (r, e) = self.rates(t_g)?;
        Ok(scattering_error(r, e, t_g, coherence_factor))
    }
}

/// Scattering error against Raman detuning at fixed t_g and fixed Ω: the rates scale
/// as 1/|Δ| from the anchor detuning, plus a constant offset for other error sources.
pub fn detuning_curve(
    anchor_rates: (f64, f64),
    anchor_detuning: f64,
    t_g: f64,
    coherence_factor: f64,
    detunings: &[f64],
    offset: f64,
) -> Result<Vec<(f64, f64)>> {
    if anchor_detuning == 0.0 || detunings.contains(&0.0) {
        return Err(Error::InvalidParameter("detunings must be non-zero".into()));
    }
    Ok(detunings
        .iter()
        .map(|&d| {
            let s = (anchor_detuning / d).abs();
            let e = 2.0 * anchor_rates.0 * s * t_g * coherence_factor + rayleigh_error(anchor_rates.1 * s, t_g);
            (d, e + offset)
        })
        .collect())
}
