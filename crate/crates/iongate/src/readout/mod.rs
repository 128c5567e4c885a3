// Copyright 2026 IonGate Contributors
// SPDX-License-Identifier: Apache-2.0

//! Fluorescence readout, SPAM estimation and population correction.

pub mod map;
pub mod model;
pub mod spam;

pub use map::{build_spam_map, correct_populations, SpamMap};
pub use model::{optimize_thresholds, simulate_detection, Detection, ReadoutModel, TrueClass};
pub use spam::{
    calibrate_shelve_error, estimate_spam, shelf_decay_bias, spam_exact, uncorrected_inflation, GateRunEmulation,
    ShelfDecayBias, SpamEstimate,
};
