// Copyright 2026 IonGate Contributors
// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::map::{build_spam_map, correct_populations, SpamMap};
use super::model::{simulate_detection, ReadoutModel, TrueClass};
use crate::error::{Error, Result};
use crate::tomography::dataset_rng;

const SHOT_CHUNK: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpamEstimate {
    pub eps_down: f64,
    pub eps_down_err: f64,
    pub eps_up: f64,
    pub eps_up_err: f64,
    pub eps_spam: f64,
    pub eps_spam_err: f64,
    pub shots_per_state: u64,
}

impl SpamEstimate {
    pub fn map(&self) -> Result<SpamMap> {
        build_spam_map(self.eps_down, self.eps_up)
    }
}

/// Mean and variance of the number of wrong-reading ions per shot.
fn wrong_ion_stats(model: &ReadoutModel, class: TrueClass, shots: u64, seed: u64, stream_base: u64) -> (f64, f64) {
    let chunks = shots.div_ceil(SHOT_CHUNK);
    let (s1, s2) = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = dataset_rng(seed, stream_base + 2 * c);
            let n = SHOT_CHUNK.min(shots - c * SHOT_CHUNK);
            let mut acc = (0.0, 0.0);
            for _ in 0..n {
                let bright = simulate_detection(class, model, &mut rng).class;
                let wrong = match class {
                    TrueClass::UpUp => 2 - bright,
                    _ => bright,
                } as f64;
                acc.0 += wrong;
                acc.1 += wrong * wrong;
            }
            acc
        })
        .reduce(|| (0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let n = shots as f64;
    let mean = s1 / n;
    (mean, (s2 / n - mean * mean).max(0.0) * n / (n - 1.0).max(1.0))
}

/// Estimate per-qubit errors from ↓↓ and ↑↑ calibration shots. Each error is
/// half the mean number of misread ions; uncertainties are binomial standard errors.
pub fn estimate_spam(model: &ReadoutModel, shots_per_state: u64, seed: u64) -> Result<SpamEstimate> {
    model.check()?;
    if shots_per_state == 0 {
        return Err(Error::InvalidParameter("shots_per_state must be >= 1".into()));
    }
    let n = shots_per_state as f64;
    let (md, vd) = wrong_ion_stats(model, TrueClass::DownDown, shots_per_state, seed, 0);
    let (mu, vu) = wrong_ion_stats(model, TrueClass::UpUp, shots_per_state, seed, 1);
    let eps_down_err = 0.5 * (vd / n).sqrt();
    let eps_up_err = 0.5 * (vu / n).sqrt();
    Ok(SpamEstimate {
        eps_down: 0.5 * md,
        eps_down_err,
        eps_up: 0.5 * mu,
        eps_up_err,
        eps_spam: 0.25 * (md + mu),
        eps_spam_err: 0.5 * eps_down_err.hypot(eps_up_err),
        shots_per_state,
    })
}

/// Expected per-qubit errors (ε↓, ε↑) of the calibration protocol for infinite shots.
pub fn spam_exact(model: &ReadoutModel) -> (f64, f64) {
    let dd = model.class_probs(TrueClass::DownDown);
    let uu = model.class_probs(TrueClass::UpUp);
    (0.5 * (dd[1] + 2.0 * dd[2]), 0.5 * (uu[1] + 2.0 * uu[0]))
}

/// Bell-state run used to emulate the partial-tomography analysis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GateRunEmulation {
    pub contrast: f64,
    pub psum: f64,
    pub n_phases: usize,
}

impl Default for GateRunEmulation {
    fn default() -> Self {
        Self { contrast: 0.9953, psum: 0.9997, n_phases: 16 }
    }
}

/// Inferred (C, Psum) after readout through `model` and processing by `process`.
fn infer<F>(emu: &GateRunEmulation, model: &ReadoutModel, process: F) -> Result<(f64, f64)>
where
    F: Fn([f64; 3]) -> Result<[f64; 3]>,
{
    if emu.n_phases < 4 {
        return Err(Error::InvalidParameter("emulation needs at least 4 phases".into()));
    }
    let n = emu.n_phases as f64;
    let mut c = 0.0;
    for i in 0..emu.n_phases {
        let phi = 2.0 * PI * i as f64 / n;
        let even = 0.5 * (1.0 + emu.contrast * (2.0 * phi).sin());
        let p = process(model.observe([0.5 * even, 1.0 - even, 0.5 * even]))?;
        c += (p[0] + p[2] - p[1]) * (2.0 * phi).sin();
    }
    let p = process(model.observe([0.5 * emu.psum, 1.0 - emu.psum, 0.5 * emu.psum]))?;
    Ok((2.0 * c / n, p[0] + p[2]))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShelfDecayBias {
    pub eps_down: f64,
    pub eps_up: f64,
    pub true_infidelity: f64,
    pub inferred_infidelity: f64,
    /// Inferred minus true infidelity; positive means gate errors are overestimated.
    pub bias: f64,
}

/// Systematic error of map-based correction when decay affects aligned and
/// single-flip states differently. Computed from exact expectations.
pub fn shelf_decay_bias(model: &ReadoutModel, emu: &GateRunEmulation) -> Result<ShelfDecayBias> {
    model.check()?;
    let (eps_down, eps_up) = spam_exact(model);
    let map = build_spam_map(eps_down, eps_up)?;
    let (c, psum) = infer(emu, model, |obs| correct_populations(obs, &map))?;
    let true_infidelity = 1.0 - 0.5 * (emu.contrast + emu.psum);
    let inferred_infidelity = 1.0 - 0.5 * (c + psum);
    Ok(ShelfDecayBias {
        eps_down,
        eps_up,
        true_infidelity,
        inferred_infidelity,
        bias: inferred_infidelity - true_infidelity,
    })
}

/// Extra apparent infidelity when raw class fractions are used as populations.
pub fn uncorrected_inflation(model: &ReadoutModel, emu: &GateRunEmulation) -> Result<f64> {
    model.check()?;
    let (eps_down, eps_up) = spam_exact(model);
    let map = build_spam_map(eps_down, eps_up)?;
    let (cc, pc) = infer(emu, model, |obs| correct_populations(obs, &map))?;
    let (cu, pu) = infer(emu, model, Ok)?;
    Ok(0.5 * ((cc + pc) - (cu + pu)))
}

/// Shelving error that makes the expected ε_SPAM equal `target`, other parameters fixed.
pub fn calibrate_shelve_error(model: &ReadoutModel, target: f64) -> Result<f64> {
    let f = |s: f64| {
        let mut m = model.clone();
        m.shelve_error = s;
        let (d, u) = spam_exact(&m);
        0.5 * (d + u) - target
    };
    if f(0.0) > 0.0 {
        return Err(Error::Calibration(format!(
            "target ε_SPAM {target:.3e} below the shelving-free value {:.3e}",
            f(0.0) + target
        )));
    }
    crate::numerics::brent_root(f, 0.0, 0.1, 1e-15, 200)
}
