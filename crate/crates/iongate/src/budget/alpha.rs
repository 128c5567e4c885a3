// Copyright 2026 IonGate Contributors
// SPDX-License-Identifier: Apache-2.0

//! Motional-dephasing coefficients α_K.

use std::collections::BTreeMap;

use nalgebra::{Matrix2, Vector2};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::noise::NoiseParams;
use crate::error::{Error, Result};
use crate::gate::{calibrated, run_bell_sequence, GateConfig, SequenceOptions};

/// K → α_K, serialized as a list of `{ loops, alpha }` entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "Vec<AlphaEntry>", try_from = "Vec<AlphaEntry>")]
pub struct AlphaTable(pub BTreeMap<u32, f64>);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlphaEntry {
    pub loops: u32,
    pub alpha: f64,
}

impl From<AlphaTable> for Vec<AlphaEntry> {
    fn from(t: AlphaTable) -> Self {
        t.0.into_iter().map(|(loops, alpha)| AlphaEntry { loops, alpha }).collect()
    }
}

impl TryFrom<Vec<AlphaEntry>> for AlphaTable {
    type Error = String;

    fn try_from(v: Vec<AlphaEntry>) -> std::result::Result<Self, String> {
        let mut m = BTreeMap::new();
        for e in v {
            if m.insert(e.loops, e.alpha).is_some() {
                return Err(format!("duplicate alpha entry for loops = {}", e.loops));
            }
        }
        Ok(Self(m))
    }
}

impl Default for AlphaTable {
    fn default() -> Self {
        Self(BTreeMap::from([(1, 0.686), (2, 0.297), (4, 0.137)]))
    }
}

impl AlphaTable {
    pub fn get(&self, loops: u32) -> Option<f64> {
        self.0.get(&loops).copied()
    }

    pub fn insert(&mut self, loops: u32, alpha: f64) {
        self.0.insert(loops, alpha);
    }

    /// α strictly decreasing in K and positive.
    pub fn validate(&self, prefix: &str) -> Vec<String> {
        let mut v = Vec::new();
        let mut prev: Option<(u32, f64)> = None;
        for (&k, &a) in &self.0 {
            if !(a > 0.0) {
                v.push(format!("{prefix}alpha[{k}] must be > 0 (got {a})"));
            }
            if let Some((pk, pa)) = prev {
                if a >= pa {
                    v.push(format!("{prefix}alpha must decrease with K: alpha[{k}] = {a} >= alpha[{pk}] = {pa}"));
                }
            }
            prev = Some((k, a));
        }
        v
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlphaFit {
    pub loops: u32,
    pub alpha: f64,
    /// Quadratic coefficient of ε against x = t_g/τ.
    pub curvature: f64,
    /// (x, ε) samples.
    pub samples: Vec<(f64, f64)>,
}

/// Default x = t_g/τ sample points for the slope fit.
pub const ALPHA_SAMPLES: [f64; 4] = [0.25e-3, 0.5e-3, 0.75e-3, 1e-3];

/// α_K from master-equation runs with only motional dephasing: least-squares fit
/// ε = αx + cx² at the given x = t_g/τ.
pub fn alpha_numeric(loops: u32, t_g: f64, xs: &[f64], opts: &SequenceOptions) -> Result<AlphaFit> {
    if xs.len() < 2 || xs.iter().any(|&x| !(x > 0.0)) {
        return Err(Error::InvalidParameter("alpha fit needs at least two positive x values".into()));
    }
    let cfg = calibrated(&GateConfig::new(t_g, loops), opts)?;
    let eps: Vec<f64> = xs
        .par_iter()
        .map(|&x| {
            let noise = NoiseParams { motional_tau: t_g / x, ..NoiseParams::zero() };
            run_bell_sequence(&cfg, &noise, opts).map(|o| o.bell_error())
        })
        .collect::<Result<_>>()?;
    let mut m = Matrix2::<f64>::zeros();
    let mut b = Vector2::<f64>::zeros();
    for (&x, &e) in xs.iter().zip(&eps) {
        let row = Vector2::new(x, x * x);
        m += row * row.transpose();
        b += row * e;
    }
    let sol = m.lu().solve(&b).ok_or_else(|| Error::Fit("singular alpha fit".into()))?;
    Ok(AlphaFit { loops, alpha: sol[0], curvature: sol[1], samples: xs.iter().copied().zip(eps).collect() })
}
