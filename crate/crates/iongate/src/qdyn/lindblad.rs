// Copyright 2026 IonGate Contributors
// SPDX-License-Identifier: Apache-2.0

//! Time-dependent Hamiltonians, Lindblad channels and state evolution.
//!
//! dρ/dt = −i[H(t), ρ] + Σ_L (L ρ L† − ½{L†L, ρ})

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::hilbert::HilbertSpec;
use super::integrate::{integrate, IntegratorConfig, OdeRhs};
use super::sparse::SparseOp;
use super::state::{QuantumState, EIGEN_TOL, HERMITIAN_TOL, TRACE_TOL};
use super::{C64, I};
use crate::error::{Error, Result};

/// Population allowed in the top two Fock levels of any mode.
pub const TRUNCATION_TOL: f64 = 1e-8;

pub type Coefficient = Arc<dyn Fn(f64) -> C64 + Send + Sync>;

/// H(t) = Σ_k f_k(t) O_k. The caller is responsible for the sum being Hermitian;
/// [`evolve`] spot-checks it.
#[derive(Clone)]
pub struct Hamiltonian {
    dim: usize,
    terms: Vec<(SparseOp, Coefficient)>,
}

impl std::fmt::Debug for Hamiltonian {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Hamiltonian").field("dim", &self.dim).field("terms", &self.terms.len()).finish()
    }
}

impl Hamiltonian {
    pub fn zero(dim: usize) -> Self {
        Self { dim, terms: Vec::new() }
    }

    pub fn constant(op: SparseOp) -> Self {
        let dim = op.dim();
        Self::zero(dim).with_term(op, Arc::new(|_| C64::new(1.0, 0.0)))
    }

    pub fn with_term(mut self, op: SparseOp, coeff: Coefficient) -> Self {
        assert_eq!(op.dim(), self.dim, "Hamiltonian term dimension mismatch");
        self.terms.push((op, coeff));
        self
    }

    pub fn with_constant(self, op: SparseOp) -> Self {
        self.with_term(op, Arc::new(|_| C64::new(1.0, 0.0)))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Assemble H(t).
    pub fn at(&self, t: f64) -> SparseOp {
        self.terms.iter().fold(SparseOp::zeros(self.dim), |acc, (op, f)| acc.add(&op.scale(f(t))))
    }

    pub fn hermiticity_defect_at(&self, t: f64) -> f64 {
        self.at(t).hermiticity_defect()
    }

    fn apply_cols_add(&self, t: f64, alpha: C64, m: &[C64], out: &mut [C64]) {
        for (op, f) in &self.terms {
            let c = f(t);
            if c != C64::new(0.0, 0.0) {
                op.apply_cols_add(alpha * c, m, out);
            }
        }
    }

    fn apply_add(&self, t: f64, alpha: C64, x: &[C64], y: &mut [C64]) {
        for (op, f) in &self.terms {
            let c = f(t);
            if c != C64::new(0.0, 0.0) {
                op.apply_add(alpha * c, x, y);
            }
        }
    }
}

/// Collapse operator with a label.
#[derive(Debug, Clone)]
pub struct LindbladChannel {
    pub operator: SparseOp,
    pub label: String,
}

impl LindbladChannel {
    pub fn new(operator: SparseOp, label: impl Into<String>) -> Self {
        Self { operator, label: label.into() }
    }

    pub fn check(&self, spec: &HilbertSpec) -> Result<()> {
        if self.operator.dim() != spec.dim() {
            return Err(Error::Dimension(format!(
                "channel '{}' has dimension {}, space has {}",
                self.label,
                self.operator.dim(),
                spec.dim()
            )));
        }
        Ok(())
    }
}

struct DensityRhs<'a> {
    dim: usize,
    h: &'a Hamiltonian,
    channels: Vec<(SparseOp, SparseOp)>,
    x: Vec<C64>,
    y: Vec<C64>,
}

impl OdeRhs for DensityRhs<'_> {
    fn eval(&mut self, t: f64, rho: &[C64], out: &mut [C64]) {
        let d = self.dim;
        let zero = C64::new(0.0, 0.0);
        let one = C64::new(1.0, 0.0);
        self.x.iter_mut().for_each(|v| *v = zero);
        self.h.apply_cols_add(t, one, rho, &mut self.x);
        // −i(Hρ − ρH) with ρH = (Hρ)† for Hermitian ρ.
        for c in 0..d {
            for r in 0..d {
                out[r + c * d] = -I * (self.x[r + c * d] - self.x[c + r * d].conj());
            }
        }
        for (l, ldl) in &self.channels {
            self.x.iter_mut().for_each(|v| *v = zero);
            l.apply_cols_add(one, rho, &mut self.x);
            for c in 0..d {
                for r in 0..d {
                    self.y[r + c * d] = self.x[c + r * d].conj();
                }
            }
            l.apply_cols_add(one, &self.y, out);
            self.x.iter_mut().for_each(|v| *v = zero);
            ldl.apply_cols_add(one, rho, &mut self.x);
            for c in 0..d {
                for r in 0..d {
                    out[r + c * d] -= (self.x[r + c * d] + self.x[c + r * d].conj()) * 0.5;
                }
            }
        }
    }
}

struct KetRhs<'a> {
    h: &'a Hamiltonian,
}

impl OdeRhs for KetRhs<'_> {
    fn eval(&mut self, t: f64, psi: &[C64], out: &mut [C64]) {
        out.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
        self.h.apply_add(t, -I, psi, out);
    }
}

/// Indices of basis states with any mode in its top two Fock levels.
fn top_level_indices(spec: &HilbertSpec) -> Vec<usize> {
    if spec.n_modes() == 0 || spec.fock_cutoff < 2 {
        return Vec::new();
    }
    let md = spec.mode_dim();
    let mot = spec.motional_dim();
    (0..spec.dim())
        .filter(|&i| {
            let mut m = i % mot;
            (0..spec.n_modes()).any(|_| {
                let level = m % md;
                m /= md;
                level + 2 > spec.fock_cutoff
            })
        })
        .collect()
}

fn check_hamiltonian(h: &Hamiltonian, times: &[f64]) -> Result<()> {
    for &t in times {
        let hm = h.at(t);
        let defect = hm.hermiticity_defect();
        let scale = hm.max_abs().max(1.0);
        if defect > 1e-10 * scale {
            return Err(Error::InvalidParameter(format!("Hamiltonian not Hermitian at t = {t:e} (defect {defect:e})")));
        }
    }
    Ok(())
}

fn spot_times(t0: f64, samples: &[f64]) -> Vec<f64> {
    let mut ts = vec![t0];
    if let Some(&last) = samples.last() {
        ts.push(0.5 * (t0 + last));
        ts.push(last);
    }
    ts
}

/// Evolve a density matrix through `samples` (absolute times, non-decreasing, ≥ `state.time`).
pub fn evolve(
    state: &QuantumState,
    hamiltonian: &Hamiltonian,
    channels: &[LindbladChannel],
    samples: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Vec<QuantumState>> {
    let d = state.dim();
    if hamiltonian.dim() != d {
        return Err(Error::Dimension(format!("Hamiltonian dimension {} vs state {d}", hamiltonian.dim())));
    }
    for ch in channels {
        ch.check(&state.spec)?;
    }
    state.validate()?;
    check_hamiltonian(hamiltonian, &spot_times(state.time, samples))?;
    let top = top_level_indices(&state.spec);
    let mut rhs = DensityRhs {
        dim: d,
        h: hamiltonian,
        channels: channels.iter().map(|c| (c.operator.clone(), c.operator.adjoint().matmul(&c.operator))).collect(),
        x: vec![C64::new(0.0, 0.0); d * d],
        y: vec![C64::new(0.0, 0.0); d * d],
    };
    let y0: Vec<C64> = state.rho.as_slice().to_vec();
    let raw = integrate(&mut rhs, &y0, state.time, samples, cfg, |t, y| {
        let tr: C64 = (0..d).map(|i| y[i + i * d]).sum();
        if (tr - C64::new(1.0, 0.0)).norm() > 10.0 * TRACE_TOL {
            return Err(Error::Integrator { time: t, reason: format!("trace drifted to {tr}") });
        }
        let top_pop: f64 = top.iter().map(|&i| y[i + i * d].re).sum();
        if top_pop > TRUNCATION_TOL {
            return Err(Error::Truncation { time: t, population: top_pop });
        }
        Ok(())
    })?;
    raw.into_iter()
        .zip(samples)
        .map(|(y, &t)| {
            let rho = DMatrix::from_column_slice(d, d, &y);
            let s = QuantumState::unchecked(state.spec.clone(), rho, t)?;
            let herm = s.hermiticity_defect();
            if herm > 10.0 * HERMITIAN_TOL {
                return Err(Error::Integrator { time: t, reason: format!("Hermiticity defect {herm:e}") });
            }
            let lam = s.min_eigenvalue();
            if lam < -10.0 * EIGEN_TOL {
                return Err(Error::Integrator { time: t, reason: format!("negative eigenvalue {lam:e}") });
            }
            Ok(s)
        })
        .collect()
}

/// Evolve a pure state under H(t) alone, from `t0` through `samples`.
pub fn evolve_ket(
    spec: &HilbertSpec,
    psi: &DVector<C64>,
    t0: f64,
    hamiltonian: &Hamiltonian,
    samples: &[f64],
    cfg: &IntegratorConfig,
) -> Result<Vec<DVector<C64>>> {
    let d = spec.dim();
    if psi.len() != d || hamiltonian.dim() != d {
        return Err(Error::Dimension(format!("ket {} / Hamiltonian {} vs space {d}", psi.len(), hamiltonian.dim())));
    }
    check_hamiltonian(hamiltonian, &spot_times(t0, samples))?;
    let top = top_level_indices(spec);
    let norm0 = psi.norm_squared();
    let mut rhs = KetRhs { h: hamiltonian };
    let raw = integrate(&mut rhs, psi.as_slice(), t0, samples, cfg, |t, y| {
        let n2: f64 = y.iter().map(|v| v.norm_sqr()).sum();
        if (n2 - norm0).abs() > 10.0 * TRACE_TOL * norm0.max(1e-300) {
            return Err(Error::Integrator { time: t, reason: format!("norm drifted to {n2}") });
        }
        let top_pop: f64 = top.iter().map(|&i| y[i].norm_sqr()).sum();
        if top_pop > TRUNCATION_TOL * norm0 {
            return Err(Error::Truncation { time: t, population: top_pop });
        }
        Ok(())
    })?;
    Ok(raw.into_iter().map(DVector::from_vec).collect())
}
