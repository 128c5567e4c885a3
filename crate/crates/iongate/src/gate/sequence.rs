// Copyright 2026 IonGate Contributors
// SPDX-License-Identifier: Apache-2.0

use std::sync::Arc;

use nalgebra::{DMatrix, DVector, Matrix4, SMatrix};
use serde::Serialize;

use super::coherent::{bell_error, geometric_phase_differential};
use super::config::GateConfig;
use super::hamiltonian::{add_force, add_lightshift, ForceOperators, FORCE_SIGNS};
use super::plan::{bell_plan, EchoModel, SequencePlan, Step};
use crate::budget::noise::NoiseParams;
use crate::error::{Error, Result};
use crate::qdyn::state::{basis_ket, fock_cutoff_for, psi_plus, thermal_mode};
use crate::qdyn::{
    evolve, evolve_ket, fidelity_with_pure, partial_trace, Hamiltonian, HilbertSpec, IntegratorConfig, LindbladChannel,
    QuantumState, Subsystem, C64,
};

/// Smallest Fock cutoff used when none is given.
pub const MIN_FOCK_CUTOFF: usize = 16;

#[derive(Debug, Clone)]
pub struct SequenceOptions {
    pub integrator: IntegratorConfig,
    /// Fock cutoff of the gate mode; chosen from n̄ and the loop size when `None`.
    pub fock_cutoff: Option<usize>,
    pub echo: EchoModel,
    /// Total Raman duration t_R; `t_g` when `None`.
    pub raman_duration: Option<f64>,
    /// Exchange the ions' labels (force signs and detuning signs).
    pub swap_ions: bool,
    /// Include the carrier light shift when `lightshift_amp > 0`.
    pub lightshift: bool,
}

impl Default for SequenceOptions {
    fn default() -> Self {
        Self {
            integrator: IntegratorConfig::adaptive(1e-10, 1e-13),
            fock_cutoff: None,
            echo: EchoModel::Ideal,
            raman_duration: None,
            swap_ions: false,
            lightshift: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Populations {
    pub down_down: f64,
    pub flip: f64,
    pub up_up: f64,
}

impl Populations {
    pub fn from_spin(rho: &DMatrix<C64>) -> Self {
        Self { down_down: rho[(0, 0)].re, flip: rho[(1, 1)].re + rho[(2, 2)].re, up_up: rho[(3, 3)].re }
    }

    pub fn sum(&self) -> f64 {
        self.down_down + self.flip + self.up_up
    }
}

#[derive(Debug, Clone)]
pub struct GateOutcome {
    /// Two-spin state with the motion traced out.
    pub final_spin_state: QuantumState,
    pub populations: Populations,
    pub bell_fidelity: f64,
    /// Rectangular first-order estimate of the anti-aligned minus aligned phase, rad.
    pub geometric_phase_differential: f64,
}

impl GateOutcome {
    pub fn bell_error(&self) -> f64 {
        1.0 - self.bell_fidelity
    }
}

pub(crate) fn signs(swap: bool) -> [f64; 2] {
    if swap {
        [FORCE_SIGNS[1], FORCE_SIGNS[0]]
    } else {
        FORCE_SIGNS
    }
}

/// Largest |α|² reached on a rectangular first-order loop, (2ηΩ/δ)².
pub fn max_displacement_sq(cfg: &GateConfig, rabi: f64) -> f64 {
    (2.0 * cfg.eta_gate * rabi / cfg.delta_angular()).powi(2)
}

fn sequence_hamiltonian(
    cfg: &GateConfig,
    fo: &ForceOperators,
    plan: &SequencePlan,
    step: usize,
    rabi: f64,
    lightshift: bool,
) -> Hamiltonian {
    let Step::Gate(p) = plan.steps[step] else { unreachable!() };
    let mut h = add_force(Hamiltonian::zero(fo.coupling.dim()), cfg, fo, p, rabi);
    if lightshift {
        h = add_lightshift(h, cfg, fo, p);
    }
    if plan.delta_f != 0.0 {
        let w = std::f64::consts::PI * plan.delta_f / 2.0;
        h = h.with_term(fo.sz_diff.clone(), Arc::new(move |_| C64::new(w, 0.0)));
    }
    h
}

fn embed_spin(u: &Matrix4<C64>, motional_dim: usize) -> DMatrix<C64> {
    let u = DMatrix::from_iterator(4, 4, u.iter().copied());
    u.kronecker(&DMatrix::identity(motional_dim, motional_dim))
}

fn prepare(cfg: &GateConfig, noise: &NoiseParams, opts: &SequenceOptions) -> Result<(f64, SequencePlan, EchoModel)> {
    cfg.check()?;
    let errs = noise.validate("noise.");
    if !errs.is_empty() {
        return Err(Error::Validation(errs));
    }
    opts.integrator.validate()?;
    let t_r = opts.raman_duration.unwrap_or(cfg.t_g);
    if !(t_r >= 0.0 && t_r.is_finite()) {
        return Err(Error::InvalidParameter(format!("Raman duration must be >= 0 (got {t_r})")));
    }
    let echo = if opts.swap_ions { opts.echo.swapped() } else { opts.echo.clone() };
    let plan = bell_plan(cfg, t_r, &echo);
    Ok((cfg.rabi * (1.0 + noise.intensity_drift_frac), plan, echo))
}

/// Full density-matrix simulation of the Bell sequence from |↓↓⟩ ⊗ thermal(n̄_gate).
pub fn run_bell_sequence(cfg: &GateConfig, noise: &NoiseParams, opts: &SequenceOptions) -> Result<GateOutcome> {
    let (rabi, plan, _) = prepare(cfg, noise, opts)?;
    let t_total: f64 = plan.gate_pulses().map(|p| p.shape.duration).sum();
    let nbar_eff = noise.nbar_gate + noise.heating_rate * t_total;
    let cutoff =
        opts.fock_cutoff.unwrap_or_else(|| fock_cutoff_for(nbar_eff, max_displacement_sq(cfg, rabi), MIN_FOCK_CUTOFF));
    let spec = HilbertSpec::gate(cutoff)?;
    let fo = ForceOperators::new(&spec, cfg, signs(opts.swap_ions))?;
    let channels: Vec<LindbladChannel> = noise.channels(&fo.ops)?;
    let mut spin0 = DMatrix::zeros(4, 4);
    spin0[(0, 0)] = C64::new(1.0, 0.0);
    let mut state = QuantumState::product(spec.clone(), &spin0, &[thermal_mode(cutoff, noise.nbar_gate)])?;
    let md = spec.motional_dim();
    for (k, step) in plan.steps.iter().enumerate() {
        match step {
            Step::Spin { unitary, duration } => {
                let u = embed_spin(unitary, md);
                state.rho = &u * &state.rho * u.adjoint();
                state.time += duration;
            }
            Step::Gate(p) => {
                if p.shape.duration == 0.0 {
                    continue;
                }
                let h = sequence_hamiltonian(cfg, &fo, &plan, k, rabi, opts.lightshift);
                state.time = p.start;
                state = evolve(&state, &h, &channels, &[p.end()], &opts.integrator)?.pop().expect("one sample");
            }
        }
    }
    let spin = partial_trace(&state, &[Subsystem::Spin(0), Subsystem::Spin(1)])?;
    let fidelity = fidelity_with_pure(&spin, &psi_plus())?;
    Ok(GateOutcome {
        populations: Populations::from_spin(&spin.rho),
        bell_fidelity: fidelity,
        geometric_phase_differential: geometric_phase_differential(cfg, &plan, rabi),
        final_spin_state: spin,
    })
}

/// Noise-free pure-state run of the Bell sequence from |↓↓⟩ ⊗ |n⟩. Returns the reduced
/// spin density matrix.
pub fn run_bell_ket(
    cfg: &GateConfig,
    fock_n: usize,
    cutoff: usize,
    rabi: f64,
    opts: &SequenceOptions,
) -> Result<SMatrix<C64, 4, 4>> {
    let (_, plan, _) = prepare(cfg, &NoiseParams::zero(), opts)?;
    if fock_n + 2 > cutoff {
        return Err(Error::InvalidParameter(format!("Fock level {fock_n} too close to cutoff {cutoff}")));
    }
    let spec = HilbertSpec::gate(cutoff)?;
    let fo = ForceOperators::new(&spec, cfg, signs(opts.swap_ions))?;
    let md = spec.motional_dim();
    let mut psi: DVector<C64> = basis_ket(spec.dim(), fock_n);
    for (k, step) in plan.steps.iter().enumerate() {
        match step {
            Step::Spin { unitary, .. } => psi = embed_spin(unitary, md) * psi,
            Step::Gate(p) => {
                if p.shape.duration == 0.0 {
                    continue;
                }
                let h = sequence_hamiltonian(cfg, &fo, &plan, k, rabi, opts.lightshift);
                psi = evolve_ket(&spec, &psi, p.start, &h, &[p.end()], &opts.integrator)?.pop().expect("one sample");
            }
        }
    }
    let mut r = SMatrix::<C64, 4, 4>::zeros();
    for s in 0..4 {
        for sp in 0..4 {
            r[(s, sp)] = (0..md).map(|m| psi[s * md + m] * psi[sp * md + m].conj()).sum();
        }
    }
    Ok(r)
}

/// Noise-free Bell error from |↓↓⟩ ⊗ |n⟩ by pure-state integration.
pub fn ket_bell_error(
    cfg: &GateConfig,
    fock_n: usize,
    cutoff: usize,
    rabi: f64,
    opts: &SequenceOptions,
) -> Result<f64> {
    Ok(bell_error(&run_bell_ket(cfg, fock_n, cutoff, rabi, opts)?))
}
