// Copyright 2026 IonGate Contributors
// SPDX-License-Identifier: Apache-2.0

use std::sync::Arc;

use super::config::{GateConfig, LambDicke};
use super::pulse::PulseShape;
use crate::error::Result;
use crate::numerics::laguerre;
use crate::qdyn::operators::local_lowering;
use crate::qdyn::{build_operators, Hamiltonian, HilbertSpec, OperatorSet, SparseOp, Subsystem, C64};

/// Force signs of the two ions.
pub const FORCE_SIGNS: [f64; 2] = [1.0, -1.0];

/// One gate pulse: envelope on [start, start + duration] and a force phase offset.
/// The force phase runs on the gate clock `t − clock_offset`, which excludes time
/// spent in finite microwave pulses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GatePulse {
    pub start: f64,
    pub shape: PulseShape,
    pub phase: f64,
    pub clock_offset: f64,
}

impl GatePulse {
    pub fn end(&self) -> f64 {
        self.start + self.shape.duration
    }

    pub fn envelope(&self, t: f64) -> f64 {
        self.shape.envelope(t - self.start)
    }
}

/// Matrix elements ⟨n|X|n+1⟩ for n < cutoff, including the factor η.
pub fn lowering_elements(eta: f64, order: LambDicke, cutoff: usize) -> Vec<f64> {
    (0..cutoff)
        .map(|n| {
            let root = ((n + 1) as f64).sqrt();
            match order {
                LambDicke::FirstOrder => eta * root,
                LambDicke::Full => (-eta * eta / 2.0).exp() * eta * laguerre(n, 1.0, eta * eta) / root,
            }
        })
        .collect()
}

/// Operators for the gate Hamiltonian on two spins and the centre-of-mass mode.
#[derive(Debug, Clone)]
pub struct ForceOperators {
    pub ops: OperatorSet,
    /// (s₁σz¹ + s₂σz²) ⊗ X.
    pub coupling: SparseOp,
    pub coupling_dag: SparseOp,
    /// σz¹ + σz².
    pub sz_sum: SparseOp,
    /// σz¹ − σz².
    pub sz_diff: SparseOp,
}

impl ForceOperators {
    pub fn new(spec: &HilbertSpec, cfg: &GateConfig, signs: [f64; 2]) -> Result<Self> {
        let ops = build_operators(spec)?;
        let g = lowering_elements(cfg.eta_gate, cfg.lamb_dicke, spec.fock_cutoff);
        let x = ops.embed(&local_lowering(&g), Subsystem::Mode(0))?;
        let s = ops.sz[0].scale(C64::new(signs[0], 0.0)).add(&ops.sz[1].scale(C64::new(signs[1], 0.0)));
        let coupling = s.matmul(&x);
        let coupling_dag = coupling.adjoint();
        let sz_sum = ops.sz[0].add(&ops.sz[1]);
        let sz_diff = ops.sz[0].sub(&ops.sz[1]);
        Ok(Self { ops, coupling, coupling_dag, sz_sum, sz_diff })
    }
}

/// Complex force amplitude f(t) with H = f(t)·S⊗X + h.c.
pub fn force_coefficient(cfg: &GateConfig, pulse: &GatePulse, rabi: f64, t: f64) -> C64 {
    let env = pulse.envelope(t);
    if env == 0.0 {
        return C64::new(0.0, 0.0);
    }
    C64::from_polar(env * rabi / 2.0, -(cfg.delta_angular() * (t - pulse.clock_offset) + pulse.phase))
}

/// Append the force terms of `pulse` to `h`.
pub fn add_force(h: Hamiltonian, cfg: &GateConfig, fo: &ForceOperators, pulse: GatePulse, rabi: f64) -> Hamiltonian {
    let c1 = cfg.clone();
    let c2 = cfg.clone();
    h.with_term(fo.coupling.clone(), Arc::new(move |t| force_coefficient(&c1, &pulse, rabi, t)))
        .with_term(fo.coupling_dag.clone(), Arc::new(move |t| force_coefficient(&c2, &pulse, rabi, t).conj()))
}

/// Append the oscillating carrier light shift env·(Ω_ls/2)·cos(2πδt + φ_opt + φ_pulse)·(σz¹+σz²).
pub fn add_lightshift(h: Hamiltonian, cfg: &GateConfig, fo: &ForceOperators, pulse: GatePulse) -> Hamiltonian {
    let amp = cfg.carrier_reduction * cfg.lightshift_amp;
    if amp == 0.0 {
        return h;
    }
    let w = 2.0 * std::f64::consts::PI * cfg.raman_difference_freq();
    let phi = cfg.optical_phase + pulse.phase;
    h.with_term(
        fo.sz_sum.clone(),
        Arc::new(move |t| C64::new(pulse.envelope(t) * amp / 2.0 * (w * (t - pulse.clock_offset) + phi).cos(), 0.0)),
    )
}

/// Force Hamiltonian of `pulse` at time `t`.
pub fn force_hamiltonian(cfg: &GateConfig, fo: &ForceOperators, pulse: &GatePulse, t: f64) -> SparseOp {
    let f = force_coefficient(cfg, pulse, cfg.rabi, t);
    fo.coupling.scale(f).add(&fo.coupling_dag.scale(f.conj()))
}
