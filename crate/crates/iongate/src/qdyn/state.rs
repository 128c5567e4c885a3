// Copyright 2026 IonGate Contributors
// SPDX-License-Identifier: Apache-2.0

//! Density-matrix states.

use nalgebra::{DMatrix, DVector};

use super::hilbert::HilbertSpec;
use super::C64;
use crate::error::{Error, Result};

pub const HERMITIAN_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-9;
pub const EIGEN_TOL: f64 = 1e-8;

/// Density matrix over a [`HilbertSpec`] at a given time.
#[derive(Debug, Clone)]
pub struct QuantumState {
    pub spec: HilbertSpec,
    pub rho: DMatrix<C64>,
    pub time: f64,
}

impl QuantumState {
    /// Wrap a density matrix after checking all state invariants.
    pub fn new(spec: HilbertSpec, rho: DMatrix<C64>, time: f64) -> Result<Self> {
        let s = Self::unchecked(spec, rho, time)?;
        s.validate()?;
        Ok(s)
    }

    /// Wrap a density matrix checking only its shape.
    pub fn unchecked(spec: HilbertSpec, rho: DMatrix<C64>, time: f64) -> Result<Self> {
        let d = spec.dim();
        if rho.nrows() != d || rho.ncols() != d {
            return Err(Error::Dimension(format!("rho is {}x{}, spec needs {d}x{d}", rho.nrows(), rho.ncols())));
        }
        Ok(Self { spec, rho, time })
    }

    pub fn from_ket(spec: HilbertSpec, ket: &DVector<C64>) -> Result<Self> {
        let norm = ket.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidParameter(format!("ket norm {norm} is not 1")));
        }
        let rho = ket * ket.adjoint();
        Self::new(spec, rho, 0.0)
    }

    /// Tensor product of a spin density matrix and one density matrix per mode.
    pub fn product(spec: HilbertSpec, spin: &DMatrix<C64>, modes: &[DMatrix<C64>]) -> Result<Self> {
        if modes.len() != spec.n_modes() {
            return Err(Error::Dimension(format!("{} mode states for {} modes", modes.len(), spec.n_modes())));
        }
        let mut rho = spin.clone();
        for m in modes {
            rho = rho.kronecker(m);
        }
        Self::new(spec, rho, 0.0)
    }

    pub fn dim(&self) -> usize {
        self.spec.dim()
    }

    pub fn trace(&self) -> C64 {
        self.rho.trace()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        hermiticity_defect(&self.rho)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let h = hermitian_part(&self.rho);
        h.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Check Hermiticity, unit trace and positivity.
    pub fn validate(&self) -> Result<()> {
        let herm = self.hermiticity_defect();
        if herm > HERMITIAN_TOL {
            return Err(Error::InvalidParameter(format!("state not Hermitian: defect {herm:e}")));
        }
        let tr = self.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(Error::InvalidParameter(format!("state trace {tr} differs from 1")));
        }
        let lam = self.min_eigenvalue();
        if lam < -EIGEN_TOL {
            return Err(Error::InvalidParameter(format!("state has eigenvalue {lam:e}")));
        }
        Ok(())
    }

    /// Population in computational basis index `i`.
    pub fn population(&self, i: usize) -> f64 {
        self.rho[(i, i)].re
    }
}

pub fn hermiticity_defect(m: &DMatrix<C64>) -> f64 {
    let mut worst: f64 = 0.0;
    for r in 0..m.nrows() {
        for c in r..m.ncols() {
            worst = worst.max((m[(r, c)] - m[(c, r)].conj()).norm());
        }
    }
    worst
}

pub fn hermitian_part(m: &DMatrix<C64>) -> DMatrix<C64> {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

/// Thermal (geometric) Fock distribution with mean `nbar`, normalised on levels 0..=cutoff.
pub fn thermal_populations(cutoff: usize, nbar: f64) -> Vec<f64> {
    if nbar <= 0.0 {
        let mut p = vec![0.0; cutoff + 1];
        p[0] = 1.0;
        return p;
    }
    let q = nbar / (nbar + 1.0);
    let mut p: Vec<f64> = (0..=cutoff).map(|n| q.powi(n as i32) / (nbar + 1.0)).collect();
    let s: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= s);
    p
}

/// Untruncated thermal tail weight above level `cutoff`.
pub fn thermal_tail(cutoff: usize, nbar: f64) -> f64 {
    if nbar <= 0.0 {
        return 0.0;
    }
    (nbar / (nbar + 1.0)).powi(cutoff as i32 + 1)
}

pub fn thermal_mode(cutoff: usize, nbar: f64) -> DMatrix<C64> {
    let p = thermal_populations(cutoff, nbar);
    DMatrix::from_diagonal(&DVector::from_iterator(cutoff + 1, p.into_iter().map(|x| C64::new(x, 0.0))))
}

pub fn fock_mode(cutoff: usize, n: usize) -> DMatrix<C64> {
    let mut m = DMatrix::zeros(cutoff + 1, cutoff + 1);
    m[(n, n)] = C64::new(1.0, 0.0);
    m
}

/// Basis ket of dimension `dim` at index `i`.
pub fn basis_ket(dim: usize, i: usize) -> DVector<C64> {
    let mut v = DVector::zeros(dim);
    v[i] = C64::new(1.0, 0.0);
    v
}

/// Bell state (|↓↓⟩ + |↑↑⟩)/√2 on two spins.
pub fn psi_plus() -> DVector<C64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    DVector::from_vec(vec![C64::new(s, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(s, 0.0)])
}

/// Fock cutoff for a thermal and displaced mode: the larger of
/// `ceil(8(n̄+1) + 4|α|²)` and the level where the thermal tail falls below `1e-10`.
pub fn fock_cutoff_for(nbar: f64, max_alpha_sq: f64, floor: usize) -> usize {
    let rule = (8.0 * (nbar + 1.0) + 4.0 * max_alpha_sq).ceil() as usize;
    let mut tail_rule = 0;
    if nbar > 0.0 {
        let q = nbar / (nbar + 1.0);
        tail_rule = ((1e-10f64).ln() / q.ln()).ceil() as usize + 2;
    }
    rule.max(tail_rule).max(floor)
}

/// Largest elementwise |a − b|.
pub fn max_abs_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}
