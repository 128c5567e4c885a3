// Copyright 2026 IonGate Contributors
// SPDX-License-Identifier: Apache-2.0

//! Composite Hilbert space description.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest full-space dimension accepted by [`HilbertSpec::new`].
pub const DIM_CEILING: usize = 4096;

/// Spins ⊗ motional modes, each mode truncated at Fock level `fock_cutoff`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HilbertSpec {
    pub n_spins: usize,
    pub fock_cutoff: usize,
    pub mode_labels: Vec<String>,
}

/// A tensor factor of a [`HilbertSpec`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    Spin(usize),
    Mode(usize),
}

impl HilbertSpec {
    pub fn new(n_spins: usize, fock_cutoff: usize, mode_labels: &[&str]) -> Result<Self> {
        let spec = Self { n_spins, fock_cutoff, mode_labels: mode_labels.iter().map(|s| s.to_string()).collect() };
        spec.check()?;
        Ok(spec)
    }

    /// Spins only, no motional mode.
    pub fn spins(n_spins: usize) -> Self {
        Self { n_spins, fock_cutoff: 0, mode_labels: Vec::new() }
    }

    /// Two spins and one centre-of-mass mode.
    pub fn gate(fock_cutoff: usize) -> Result<Self> {
        Self::new(2, fock_cutoff, &["com"])
    }

    pub fn check(&self) -> Result<()> {
        let dim = self.checked_dim().ok_or(Error::DimensionOverflow { dim: usize::MAX, ceiling: DIM_CEILING })?;
        if dim > DIM_CEILING {
            return Err(Error::DimensionOverflow { dim, ceiling: DIM_CEILING });
        }
        Ok(())
    }

    fn checked_dim(&self) -> Option<usize> {
        let mut d = 1usize.checked_shl(u32::try_from(self.n_spins).ok()?)?;
        for _ in 0..self.n_modes() {
            d = d.checked_mul(self.fock_cutoff.checked_add(1)?)?;
        }
        Some(d)
    }

    pub fn n_modes(&self) -> usize {
        self.mode_labels.len()
    }

    pub fn mode_dim(&self) -> usize {
        self.fock_cutoff + 1
    }

    pub fn spin_dim(&self) -> usize {
        1 << self.n_spins
    }

    pub fn motional_dim(&self) -> usize {
        self.mode_dim().pow(self.n_modes() as u32)
    }

    pub fn dim(&self) -> usize {
        self.spin_dim() * self.motional_dim()
    }

    /// Dimensions of every tensor factor in basis order.
    pub fn factor_dims(&self) -> Vec<usize> {
        let mut dims = vec![2; self.n_spins];
        dims.extend(std::iter::repeat(self.mode_dim()).take(self.n_modes()));
        dims
    }

    pub fn factor_index(&self, sub: Subsystem) -> Result<usize> {
        match sub {
            Subsystem::Spin(j) if j < self.n_spins => Ok(j),
            Subsystem::Mode(m) if m < self.n_modes() => Ok(self.n_spins + m),
            _ => Err(Error::Dimension(format!("subsystem {sub:?} not in {self:?}"))),
        }
    }

    /// Spec containing only the listed factors, in their original order.
    pub fn reduced(&self, keep: &[Subsystem]) -> Result<Self> {
        let mut spins = 0;
        let mut labels = Vec::new();
        for (idx, label) in self.mode_labels.iter().enumerate() {
            if keep.contains(&Subsystem::Mode(idx)) {
                labels.push(label.clone());
            }
        }
        for j in 0..self.n_spins {
            if keep.contains(&Subsystem::Spin(j)) {
                spins += 1;
            }
        }
        for k in keep {
            self.factor_index(*k)?;
        }
        Ok(Self {
            n_spins: spins,
            fock_cutoff: if labels.is_empty() { 0 } else { self.fock_cutoff },
            mode_labels: labels,
        })
    }
}
