// Copyright 2026 IonGate Contributors
// SPDX-License-Identifier: Apache-2.0

//! The σz⊗σz light-shift gate: spin-dependent force on the centre-of-mass mode,
//! pulse shaping, calibration, the Bell-state spin-echo sequence and its dynamics.

pub mod calibrate;
pub mod coherent;
pub mod config;
pub mod dynamics;
pub mod hamiltonian;
pub mod lightshift;
pub mod plan;
pub mod pulse;
pub mod sequence;
pub mod thermal;

pub use calibrate::{calibrate_rabi, calibrate_rabi_to, calibrated, Calibration, CALIBRATION_TOL};
pub use config::{GateConfig, LambDicke, ShapeKind};
pub use dynamics::{population_dynamics, population_dynamics_analytic, DynamicsPoint};
pub use hamiltonian::{force_hamiltonian, ForceOperators, GatePulse, FORCE_SIGNS};
pub use lightshift::{calibrate_lightshift_amp, carrier_lightshift_error, LightShiftResult};
pub use plan::{bell_plan, EchoModel, SequencePlan, Step};
pub use pulse::PulseShape;
pub use sequence::{run_bell_sequence, GateOutcome, Populations, SequenceOptions};
pub use thermal::{gate_mode_thermal_error, spectator_thermal_error, ThermalPoint};
