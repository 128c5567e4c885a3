// Copyright 2026 IonGate Contributors
// SPDX-License-Identifier: Apache-2.0

//! Parity-fringe synthesis and fitting, and Bell-fidelity composition.

pub mod bias;
pub mod dataset;
pub mod fidelity;
pub mod fit;

pub use bias::{bias_study, bootstrap_ml, dataset_rng, BiasEstimate, BiasStudy, FringeParams, DEFAULT_PHASE_POINTS};
pub use dataset::{model_probability, synthesize_parity, synthesize_parity_seeded, uniform_phases, ParityDataset};
pub use fidelity::{bell_fidelity, parity, Corrections, FidelityResult, Measured};
pub use fit::{fit_least_squares, fit_ml_binomial, log_likelihood, FitMethod, FitResult};
