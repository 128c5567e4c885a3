// Copyright 2026 IonGate Contributors
// SPDX-License-Identifier: Apache-2.0

//! Closed-form solution of the noise-free gate for rectangular first-order pulses
//! acting on the motional ground state.
//!
//! Each spin basis state |s⟩ sees H = λ_s(a e^{−iθ(t)} + a† e^{iθ(t)}) with
//! λ_s = ηΩS_s/2, so the motion stays coherent. The joint state is kept as a list
//! of terms amp·|s⟩⊗|β⟩.

use nalgebra::{Matrix4, SMatrix};

use super::config::{GateConfig, LambDicke, ShapeKind};
use super::hamiltonian::{GatePulse, FORCE_SIGNS};
use super::plan::{SequencePlan, Step};
use crate::error::{Error, Result};
use crate::qdyn::C64;

const SZ: [f64; 2] = [-1.0, 1.0];

/// Spin-dependent force value S_s = s₁σz¹ + s₂σz² on basis index `s`.
pub fn force_value(s: usize, signs: [f64; 2]) -> f64 {
    signs[0] * SZ[s >> 1] + signs[1] * SZ[s & 1]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub spin: usize,
    pub amp: C64,
    pub beta: C64,
}

/// Displacement α and phase Φ of a rectangular segment with coupling λ on [t0, t1],
/// for detuning δ (rad/s) and force phase φ.
pub fn segment(lambda: f64, delta: f64, phi: f64, t0: f64, t1: f64) -> (C64, f64) {
    let e = |t: f64| C64::from_polar(1.0, delta * t);
    let alpha = -C64::from_polar(lambda, phi) * (e(t1) - e(t0)) / delta;
    let tt = t1 - t0;
    let phase = lambda * lambda / delta * (tt - (delta * tt).sin() / delta);
    (alpha, phase)
}

/// ⟨β′|β⟩ for coherent states.
pub fn coherent_overlap(bp: C64, b: C64) -> C64 {
    (-(b.norm_sqr() + bp.norm_sqr()) / 2.0 + bp.conj() * b).exp()
}

#[derive(Debug, Clone)]
pub struct CoherentState {
    pub terms: Vec<Term>,
    pub signs: [f64; 2],
}

impl CoherentState {
    pub fn new(spin_amps: [C64; 4], signs: [f64; 2]) -> Self {
        let terms = (0..4)
            .filter(|&s| spin_amps[s].norm() > 0.0)
            .map(|s| Term { spin: s, amp: spin_amps[s], beta: C64::new(0.0, 0.0) })
            .collect();
        Self { terms, signs }
    }

    pub fn apply_spin(&mut self, u: &Matrix4<C64>) {
        let mut out: Vec<Term> = Vec::with_capacity(self.terms.len() * 4);
        for t in &self.terms {
            for s in 0..4 {
                let a = u[(s, t.spin)] * t.amp;
                if a.norm() == 0.0 {
                    continue;
                }
                if let Some(m) = out.iter_mut().find(|m| m.spin == s && (m.beta - t.beta).norm() < 1e-14) {
                    m.amp += a;
                } else {
                    out.push(Term { spin: s, amp: a, beta: t.beta });
                }
            }
        }
        out.retain(|t| t.amp.norm() > 1e-300);
        self.terms = out;
    }

    /// Rectangular force pulse with coupling ηΩ/2 per unit force, plus static precession at δf.
    pub fn apply_pulse(&mut self, cfg: &GateConfig, pulse: &GatePulse, rabi: f64, delta_f: f64) {
        let delta = cfg.delta_angular();
        let t0 = pulse.start - pulse.clock_offset;
        let t1 = t0 + pulse.shape.duration;
        for t in &mut self.terms {
            let lambda = cfg.eta_gate * rabi * force_value(t.spin, self.signs) / 2.0;
            if lambda != 0.0 {
                let (alpha, phi) = segment(lambda, delta, pulse.phase, t0, t1);
                t.amp *= C64::from_polar(1.0, phi + (alpha * t.beta.conj()).im);
                t.beta += alpha;
            }
            let z = SZ[t.spin >> 1] - SZ[t.spin & 1];
            t.amp *= C64::from_polar(1.0, -std::f64::consts::PI * delta_f / 2.0 * z * pulse.shape.duration);
        }
    }

    /// Reduced two-spin density matrix.
    pub fn spin_density(&self) -> SMatrix<C64, 4, 4> {
        let mut r = SMatrix::<C64, 4, 4>::zeros();
        for a in &self.terms {
            for b in &self.terms {
                r[(a.spin, b.spin)] += a.amp * b.amp.conj() * coherent_overlap(b.beta, a.beta);
            }
        }
        r
    }
}

fn check_supported(cfg: &GateConfig) -> Result<()> {
    if cfg.shape != ShapeKind::Rectangular || cfg.lamb_dicke != LambDicke::FirstOrder {
        return Err(Error::InvalidParameter(
            "the closed-form solution needs rectangular pulses and first-order coupling".into(),
        ));
    }
    Ok(())
}

/// Reduced spin density after `plan`, starting from |↓↓⟩ and the motional ground state.
pub fn run_plan(cfg: &GateConfig, plan: &SequencePlan, rabi: f64, signs: [f64; 2]) -> Result<SMatrix<C64, 4, 4>> {
    check_supported(cfg)?;
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let mut st = CoherentState::new([one, zero, zero, zero], signs);
    for step in &plan.steps {
        match step {
            Step::Spin { unitary, .. } => st.apply_spin(unitary),
            Step::Gate(p) => st.apply_pulse(cfg, p, rabi, plan.delta_f),
        }
    }
    Ok(st.spin_density())
}

/// Differential geometric phase Φ(anti-aligned) − Φ(aligned) accumulated by the gate
/// pulses of `plan`, with the π pulse exchanging the anti-aligned states.
pub fn geometric_phase_differential(cfg: &GateConfig, plan: &SequencePlan, rabi: f64) -> f64 {
    let delta = cfg.delta_angular();
    let mut s_val = force_value(1, FORCE_SIGNS);
    let mut beta = C64::new(0.0, 0.0);
    let mut total = 0.0;
    for p in plan.gate_pulses() {
        let t0 = p.start - p.clock_offset;
        let lambda = cfg.eta_gate * rabi * s_val / 2.0;
        let (alpha, phi) = segment(lambda, delta, p.phase, t0, t0 + p.shape.duration);
        total += phi + (alpha * beta.conj()).im;
        beta += alpha;
        s_val = -s_val;
    }
    total
}

/// 1 − ⟨ψ+|ρ|ψ+⟩ for a two-spin density matrix.
pub fn bell_error(rho: &SMatrix<C64, 4, 4>) -> f64 {
    1.0 - 0.5 * (rho[(0, 0)] + rho[(3, 3)] + rho[(0, 3)] + rho[(3, 0)]).re
}
