// Copyright 2026 IonGate Contributors
// SPDX-License-Identifier: Apache-2.0

//! Spin and mode operators embedded in the full tensor space.

use super::hilbert::{HilbertSpec, Subsystem};
use super::sparse::SparseOp;
use super::C64;
use crate::error::Result;

/// All single-factor operators of a [`HilbertSpec`], embedded in the full space.
#[derive(Debug, Clone)]
pub struct OperatorSet {
    pub spec: HilbertSpec,
    pub identity: SparseOp,
    pub sx: Vec<SparseOp>,
    pub sy: Vec<SparseOp>,
    pub sz: Vec<SparseOp>,
    /// σ+ = |↑⟩⟨↓|.
    pub sp: Vec<SparseOp>,
    /// σ− = |↓⟩⟨↑|.
    pub sm: Vec<SparseOp>,
    pub a: Vec<SparseOp>,
    pub adag: Vec<SparseOp>,
    pub num: Vec<SparseOp>,
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn local_sx() -> SparseOp {
    SparseOp::from_triplets(2, vec![(0, 1, c(1.0, 0.0)), (1, 0, c(1.0, 0.0))])
}

pub fn local_sy() -> SparseOp {
    SparseOp::from_triplets(2, vec![(0, 1, c(0.0, 1.0)), (1, 0, c(0.0, -1.0))])
}

pub fn local_sz() -> SparseOp {
    SparseOp::diagonal(&[c(-1.0, 0.0), c(1.0, 0.0)])
}

pub fn local_sp() -> SparseOp {
    SparseOp::from_triplets(2, vec![(1, 0, c(1.0, 0.0))])
}

pub fn local_sm() -> SparseOp {
    SparseOp::from_triplets(2, vec![(0, 1, c(1.0, 0.0))])
}

/// Truncated annihilation operator on Fock levels 0..=cutoff.
pub fn local_a(cutoff: usize) -> SparseOp {
    SparseOp::from_triplets(cutoff + 1, (1..=cutoff).map(|n| (n - 1, n, c((n as f64).sqrt(), 0.0))).collect())
}

/// Lowering operator with arbitrary matrix elements `⟨n|G|n+1⟩ = g[n]`.
pub fn local_lowering(g: &[f64]) -> SparseOp {
    SparseOp::from_triplets(g.len() + 1, g.iter().enumerate().map(|(n, &v)| (n, n + 1, c(v, 0.0))).collect())
}

pub fn local_num(cutoff: usize) -> SparseOp {
    SparseOp::diagonal(&(0..=cutoff).map(|n| c(n as f64, 0.0)).collect::<Vec<_>>())
}

/// Embed a single-factor operator acting on `sub` into the full space.
pub fn embed(spec: &HilbertSpec, local: &SparseOp, sub: Subsystem) -> Result<SparseOp> {
    let target = spec.factor_index(sub)?;
    let dims = spec.factor_dims();
    let before: usize = dims[..target].iter().product();
    let after: usize = dims[target + 1..].iter().product();
    Ok(SparseOp::identity(before).kron(local).kron(&SparseOp::identity(after)))
}

/// Build every embedded operator for `spec`, rejecting oversize spaces.
pub fn build_operators(spec: &HilbertSpec) -> Result<OperatorSet> {
    spec.check()?;
    let mut ops = OperatorSet {
        spec: spec.clone(),
        identity: SparseOp::identity(spec.dim()),
        sx: Vec::new(),
        sy: Vec::new(),
        sz: Vec::new(),
        sp: Vec::new(),
        sm: Vec::new(),
        a: Vec::new(),
        adag: Vec::new(),
        num: Vec::new(),
    };
    for j in 0..spec.n_spins {
        let s = Subsystem::Spin(j);
        ops.sx.push(embed(spec, &local_sx(), s)?);
        ops.sy.push(embed(spec, &local_sy(), s)?);
        ops.sz.push(embed(spec, &local_sz(), s)?);
        ops.sp.push(embed(spec, &local_sp(), s)?);
        ops.sm.push(embed(spec, &local_sm(), s)?);
    }
    for m in 0..spec.n_modes() {
        let s = Subsystem::Mode(m);
        let a = local_a(spec.fock_cutoff);
        ops.adag.push(embed(spec, &a.adjoint(), s)?);
        ops.a.push(embed(spec, &a, s)?);
        ops.num.push(embed(spec, &local_num(spec.fock_cutoff), s)?);
    }
    Ok(ops)
}

impl OperatorSet {
    /// Embed an arbitrary local operator.
    pub fn embed(&self, local: &SparseOp, sub: Subsystem) -> Result<SparseOp> {
        embed(&self.spec, local, sub)
    }

    /// Projector onto Fock level `n` of mode `m`.
    pub fn fock_projector(&self, m: usize, n: usize) -> Result<SparseOp> {
        let local = SparseOp::from_triplets(self.spec.mode_dim(), vec![(n, n, c(1.0, 0.0))]);
        embed(&self.spec, &local, Subsystem::Mode(m))
    }
}
