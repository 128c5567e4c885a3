// Copyright 2026 IonGate Contributors
// SPDX-License-Identifier: Apache-2.0

//! Expectation values, partial traces and fidelities.

use nalgebra::{DMatrix, DVector};

use super::hilbert::Subsystem;
use super::sparse::SparseOp;
use super::state::{hermitian_part, QuantumState};
use super::C64;
use crate::error::{Error, Result};

/// tr(O ρ).
pub fn expectation(state: &QuantumState, op: &SparseOp) -> Result<C64> {
    if op.dim() != state.dim() {
        return Err(Error::Dimension(format!("operator {} vs state {}", op.dim(), state.dim())));
    }
    Ok(op.triplets().map(|(r, c, v)| v * state.rho[(c, r)]).sum())
}

/// Trace out every factor not listed in `keep`.
pub fn partial_trace(state: &QuantumState, keep: &[Subsystem]) -> Result<QuantumState> {
    let spec = &state.spec;
    let dims = spec.factor_dims();
    let kept: Vec<usize> = keep.iter().map(|&k| spec.factor_index(k)).collect::<Result<_>>()?;
    let mut kept_sorted = kept.clone();
    kept_sorted.sort_unstable();
    kept_sorted.dedup();
    let reduced_spec = spec.reduced(keep)?;
    let rd: usize = kept_sorted.iter().map(|&f| dims[f]).product();
    let nf = dims.len();
    let digits = |mut i: usize| -> Vec<usize> {
        let mut out = vec![0; nf];
        for f in (0..nf).rev() {
            out[f] = i % dims[f];
            i /= dims[f];
        }
        out
    };
    let compose = |dg: &[usize], set: &[usize]| -> usize { set.iter().fold(0, |acc, &f| acc * dims[f] + dg[f]) };
    let traced: Vec<usize> = (0..nf).filter(|f| !kept_sorted.contains(f)).collect();
    let d = spec.dim();
    let all_digits: Vec<Vec<usize>> = (0..d).map(digits).collect();
    let kept_idx: Vec<usize> = all_digits.iter().map(|dg| compose(dg, &kept_sorted)).collect();
    let traced_idx: Vec<usize> = all_digits.iter().map(|dg| compose(dg, &traced)).collect();
    let mut out = DMatrix::<C64>::zeros(rd, rd);
    for c in 0..d {
        for r in 0..d {
            if traced_idx[r] == traced_idx[c] {
                out[(kept_idx[r], kept_idx[c])] += state.rho[(r, c)];
            }
        }
    }
    QuantumState::unchecked(reduced_spec, out, state.time)
}

/// ⟨ψ|ρ|ψ⟩ clamped to [0, 1].
pub fn fidelity_with_pure(state: &QuantumState, psi: &DVector<C64>) -> Result<f64> {
    if psi.len() != state.dim() {
        return Err(Error::Dimension(format!("ket {} vs state {}", psi.len(), state.dim())));
    }
    let n = psi.norm();
    if (n - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidParameter(format!("ket norm {n} is not 1")));
    }
    let f = (psi.adjoint() * &state.rho * psi)[(0, 0)].re;
    if !(-1e-9..=1.0 + 1e-9).contains(&f) {
        return Err(Error::InvalidParameter(format!("fidelity {f} outside [0, 1]")));
    }
    Ok(f.clamp(0.0, 1.0))
}

pub fn purity(state: &QuantumState) -> f64 {
    state.rho.iter().map(|v| v.norm_sqr()).sum()
}

/// Von Neumann entropy in nats.
pub fn von_neumann_entropy(state: &QuantumState) -> f64 {
    hermitian_part(&state.rho).symmetric_eigenvalues().iter().filter(|&&l| l > 1e-15).map(|&l| -l * l.ln()).sum()
}
