// Copyright 2026 IonGate Contributors
// SPDX-License-Identifier: Apache-2.0

//! Simulation and analysis toolkit for a trapped-ion σz⊗σz geometric phase gate.
//!
//! The crate is organised by study:
//!
//! - [`qdyn`]: operator algebra and Lindblad integration on spin ⊗ Fock spaces.
//! - [`gate`]: gate Hamiltonian, calibration, Bell-state sequence and dynamics.
//! - [`budget`]: closed-form error channels, oracle cross-checks and budgets.
//! - [`spinecho`]: finite microwave pulse spin-echo error.
//! - [`tomography`]: parity fringe synthesis, ML / LS fitting, fidelity.
//! - [`readout`]: fluorescence readout Monte Carlo and SPAM correction.
//! - [`rbm`]: single-qubit randomized benchmarking.
//! - [`config`]: experiment configuration, profiles and result envelopes.
//! - [`cli`] and [`validate`]: the command-line driver.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod budget;
pub mod cli;
pub mod config;
pub mod error;
pub mod gate;
pub mod numerics;
pub mod qdyn;
pub mod rbm;
pub mod readout;
pub mod spinecho;
pub mod tomography;
pub mod validate;

pub use error::{Error, Result};

/// Crate version string embedded in result envelopes.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
