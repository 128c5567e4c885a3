// Copyright 2026 IonGate Contributors
// SPDX-License-Identifier: Apache-2.0

//! Two-ion fluorescence readout with shelf decay during detection.
//!
//! ↓ is shelved (dark), ↑ fluoresces. The observed class is the number of
//! bright ions inferred from the photon count: 0, 1 or 2.

use rand::Rng;
use rand_distr::{Distribution, Exp, Poisson};
use serde::{Deserialize, Serialize};
use statrs::distribution::{DiscreteCDF, Poisson as PoissonDist};

use crate::error::{Error, Result};
use crate::numerics::Quadrature;

const DECAY_PANELS: usize = 16;
const DECAY_ORDER: usize = 8;

/// True two-ion population class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrueClass {
    DownDown,
    Flip,
    UpUp,
}

impl TrueClass {
    pub const ALL: [TrueClass; 3] = [TrueClass::DownDown, TrueClass::Flip, TrueClass::UpUp];

    pub fn index(self) -> usize {
        match self {
            TrueClass::DownDown => 0,
            TrueClass::Flip => 1,
            TrueClass::UpUp => 2,
        }
    }

    /// Intended per-ion states, `true` for ↑.
    pub fn ions(self) -> [bool; 2] {
        match self {
            TrueClass::DownDown => [false, false],
            TrueClass::Flip => [false, true],
            TrueClass::UpUp => [true, true],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReadoutModel {
    /// Counts per ms from one fluorescing ion.
    pub bright_rate: f64,
    /// Background counts per ms.
    pub dark_rate: f64,
    /// Detection window, ms.
    pub detect_time: f64,
    /// Shelf lifetime, ms. `f64::INFINITY` disables decay.
    pub shelf_lifetime: f64,
    /// Count cut points: class 0 below `thresholds[0]`, class 2 at or above `thresholds[1]`.
    pub thresholds: [u64; 2],
    /// Per-qubit probability of preparing the wrong state.
    pub prep_error: f64,
    /// Probability that a ↓ ion fails to shelve and fluoresces.
    #[serde(default)]
    pub shelve_error: f64,
}

impl Default for ReadoutModel {
    fn default() -> Self {
        Self {
            bright_rate: 90.0,
            dark_rate: 0.5,
            detect_time: 1.9,
            shelf_lifetime: 1168.0,
            thresholds: [124, 273],
            prep_error: 1.0e-3,
            shelve_error: 1.006315e-3,
        }
    }
}

impl ReadoutModel {
    /// Noise-free readout with thresholds optimised for the given rates.
    pub fn ideal(bright_rate: f64, dark_rate: f64, detect_time: f64) -> Result<Self> {
        let mut m = Self {
            bright_rate,
            dark_rate,
            detect_time,
            shelf_lifetime: f64::INFINITY,
            thresholds: [1, 2],
            prep_error: 0.0,
            shelve_error: 0.0,
        };
        m.thresholds = optimize_thresholds(&m)?;
        Ok(m)
    }

    pub fn validate(&self, prefix: &str) -> Vec<String> {
        let mut v = Vec::new();
        for (name, x) in [("bright_rate", self.bright_rate), ("dark_rate", self.dark_rate)] {
            if !(x >= 0.0 && x.is_finite()) {
                v.push(format!("{prefix}{name} must be finite and >= 0 (got {x})"));
            }
        }
        if !(self.detect_time > 0.0 && self.detect_time.is_finite()) {
            v.push(format!("{prefix}detect_time must be > 0 (got {})", self.detect_time));
        }
        if !(self.shelf_lifetime > 0.0) {
            v.push(format!("{prefix}shelf_lifetime must be > 0 (got {})", self.shelf_lifetime));
        }
        if self.thresholds[0] >= self.thresholds[1] {
            v.push(format!("{prefix}thresholds must be strictly increasing (got {:?})", self.thresholds));
        }
        for (name, x) in [("prep_error", self.prep_error), ("shelve_error", self.shelve_error)] {
            if !(0.0..0.5).contains(&x) {
                v.push(format!("{prefix}{name} must lie in [0, 0.5) (got {x})"));
            }
        }
        v
    }

    pub fn check(&self) -> Result<()> {
        let v = self.validate("readout.");
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(v))
        }
    }

    /// Probability that a shelved ion decays within the detection window.
    pub fn decay_probability(&self) -> f64 {
        if self.shelf_lifetime.is_infinite() {
            0.0
        } else {
            -(-self.detect_time / self.shelf_lifetime).exp_m1()
        }
    }

    /// Classify a photon count.
    pub fn classify(&self, counts: u64) -> usize {
        if counts < self.thresholds[0] {
            0
        } else if counts < self.thresholds[1] {
            1
        } else {
            2
        }
    }

    fn base_mean(&self, bright: usize) -> f64 {
        (self.dark_rate + bright as f64 * self.bright_rate) * self.detect_time
    }

    /// Probability that a single ion ends shelved given its intended state.
    pub fn shelved_probability(&self, up: bool) -> f64 {
        let down_after_prep = if up { self.prep_error } else { 1.0 - self.prep_error };
        down_after_prep * (1.0 - self.shelve_error)
    }

    /// P(count < t) for `shelved` dark ions (the rest bright), averaged over decay times.
    pub fn count_cdf_below(&self, shelved: usize, t: u64) -> f64 {
        let below = |lambda: f64| {
            if t == 0 {
                0.0
            } else if lambda <= 0.0 {
                1.0
            } else {
                PoissonDist::new(lambda).map_or(0.0, |p| p.cdf(t - 1))
            }
        };
        let l0 = self.base_mean(2 - shelved);
        if shelved == 0 || self.shelf_lifetime.is_infinite() {
            return below(l0);
        }
        let tau = self.shelf_lifetime;
        let tt = self.detect_time;
        let r = self.bright_rate;
        let survive = (-tt / tau).exp();
        let q = Quadrature::new(0.0, tt, DECAY_PANELS, DECAY_ORDER);
        let density = |s: f64| (-s / tau).exp() / tau;
        match shelved {
            1 => survive * below(l0) + q.integrate(|s| density(s) * below(l0 + r * (tt - s))),
            _ => {
                let one = q.integrate(|s| density(s) * below(l0 + r * (tt - s)));
                let coarse = Quadrature::new(0.0, tt, 4, DECAY_ORDER);
                let two = coarse.integrate(|s1| {
                    density(s1) * coarse.integrate(|s2| density(s2) * below(l0 + r * (2.0 * tt - s1 - s2)))
                });
                survive * survive * below(l0) + 2.0 * survive * one + two
            }
        }
    }

    /// Class probabilities for a fixed number of shelved ions.
    pub fn class_probs_shelved(&self, shelved: usize) -> [f64; 3] {
        let c0 = self.count_cdf_below(shelved, self.thresholds[0]);
        let c1 = self.count_cdf_below(shelved, self.thresholds[1]);
        [c0, c1 - c0, 1.0 - c1]
    }

    /// Exact observed-class probabilities for a true population class,
    /// including preparation, shelving and decay errors.
    pub fn class_probs(&self, class: TrueClass) -> [f64; 3] {
        let [a, b] = class.ions().map(|up| self.shelved_probability(up));
        let ps = [(1.0 - a) * (1.0 - b), a * (1.0 - b) + b * (1.0 - a), a * b];
        let mut out = [0.0; 3];
        for (s, &w) in ps.iter().enumerate() {
            let cp = self.class_probs_shelved(s);
            for k in 0..3 {
                out[k] += w * cp[k];
            }
        }
        out
    }

    /// Observed-class distribution for true populations [P↓↓, P_flip, P↑↑].
    pub fn observe(&self, populations: [f64; 3]) -> [f64; 3] {
        let mut out = [0.0; 3];
        for class in TrueClass::ALL {
            let cp = self.class_probs(class);
            for k in 0..3 {
                out[k] += populations[class.index()] * cp[k];
            }
        }
        out
    }
}

/// One simulated detection event.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Detection {
    pub class: usize,
    pub counts: u64,
}

/// Monte Carlo detection of one shot prepared in `class`.
pub fn simulate_detection<R: Rng + ?Sized>(class: TrueClass, model: &ReadoutModel, rng: &mut R) -> Detection {
    let tt = model.detect_time;
    let mut lambda = model.dark_rate * tt;
    let decay = (model.shelf_lifetime.is_finite()).then(|| Exp::new(1.0 / model.shelf_lifetime).ok()).flatten();
    for up in class.ions() {
        let shelved = rng.gen::<f64>() < model.shelved_probability(up);
        if !shelved {
            lambda += model.bright_rate * tt;
        } else if let Some(d) = &decay {
            let s: f64 = d.sample(rng);
            if s < tt {
                lambda += model.bright_rate * (tt - s);
            }
        }
    }
    let counts = if lambda > 0.0 { Poisson::new(lambda).map_or(0.0, |p| p.sample(rng)) as u64 } else { 0 };
    Detection { class: model.classify(counts), counts }
}

/// Thresholds minimising the summed misclassification over 0, 1 and 2 bright ions.
pub fn optimize_thresholds(model: &ReadoutModel) -> Result<[u64; 2]> {
    let mid = model.base_mean(1).ceil() as u64 + 1;
    let top = model.base_mean(2).ceil() as u64 + 2;
    // class boundaries separate: t1 splits 0 from 1 bright, t2 splits 1 from 2
    let cost1 = |t: u64| (1.0 - model.count_cdf_below(2, t)) + model.count_cdf_below(1, t);
    let cost2 = |t: u64| (1.0 - model.count_cdf_below(1, t)) + model.count_cdf_below(0, t);
    let best = |range: std::ops::RangeInclusive<u64>, f: &dyn Fn(u64) -> f64| {
        range.map(|t| (t, f(t))).min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)))
    };
    let (t1, _) = best(1..=mid, &cost1).ok_or_else(|| Error::InvalidParameter("empty threshold range".into()))?;
    let (t2, _) = best(t1 + 1..=top, &cost2).ok_or_else(|| Error::InvalidParameter("empty threshold range".into()))?;
    Ok([t1, t2])
}
