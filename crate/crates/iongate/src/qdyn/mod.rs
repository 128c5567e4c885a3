// Copyright 2026 IonGate Contributors
// SPDX-License-Identifier: Apache-2.0

//! Operator algebra and Lindblad master-equation integration for
//! spin ⊗ truncated-oscillator systems.
//!
//! Basis ordering: spins first (spin 0 most significant), then modes. For a
//! spin, index 0 is |↓⟩ and index 1 is |↑⟩, with σz = diag(−1, +1).

pub mod hilbert;
pub mod integrate;
pub mod lindblad;
pub mod measures;
pub mod operators;
pub mod sparse;
pub mod state;

pub use hilbert::{HilbertSpec, Subsystem};
pub use integrate::{IntegratorConfig, Method};
pub use lindblad::{evolve, evolve_ket, Hamiltonian, LindbladChannel};
pub use measures::{expectation, fidelity_with_pure, partial_trace, purity, von_neumann_entropy};
pub use operators::{build_operators, OperatorSet};
pub use sparse::SparseOp;
pub use state::QuantumState;

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;

pub(crate) const I: C64 = C64::new(0.0, 1.0);
