// Copyright 2026 IonGate Contributors
// SPDX-License-Identifier: Apache-2.0

//! Error budget: closed-form channel errors, master-equation oracles, budget tables,
//! model curves against gate duration and multi-gate scaling.

pub mod alpha;
pub mod formulas;
pub mod multigate;
pub mod noise;
pub mod oracle;
pub mod scattering;
pub mod table;

pub use alpha::{alpha_numeric, AlphaEntry, AlphaFit, AlphaTable, ALPHA_SAMPLES};
pub use formulas::*;
pub use multigate::{multi_gate_error, multi_gate_study, simulate_multi_gate, MultiGateStudy};
pub use noise::NoiseParams;
pub use oracle::{dephasing_oracle, heating_oracle, raman_oracle, rayleigh_oracle, OracleCheck};
pub use scattering::{anchor_rates, detuning_curve, raman_coherence_factor, RatePoint, ScatteringModel};
pub use table::{budget_table, model_curves, ErrorBudget, ModelPoint, CHANNELS};
