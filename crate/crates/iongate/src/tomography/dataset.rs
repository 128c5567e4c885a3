// Copyright 2026 IonGate Contributors
// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::PI;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Even-parity counts against analysis phase.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParityDataset {
    pub phases: Vec<f64>,
    pub even_counts: Vec<u64>,
    pub total_shots: Vec<u64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct CsvRow {
    phase_rad: f64,
    even_counts: u64,
    shots: u64,
}

/// `n` phases evenly spaced on [0, 2π).
pub fn uniform_phases(n: usize) -> Vec<f64> {
    (0..n).map(|i| 2.0 * PI * i as f64 / n as f64).collect()
}

/// Fringe model p(φ) = (1 + C0 + C sin 2(φ − φ0))/2.
pub fn model_probability(c: f64, c0: f64, phi0: f64, phi: f64) -> f64 {
    0.5 * (1.0 + c0 + c * (2.0 * (phi - phi0)).sin())
}

impl ParityDataset {
    pub fn new(phases: Vec<f64>, even_counts: Vec<u64>, total_shots: Vec<u64>) -> Result<Self> {
        let d = Self { phases, even_counts, total_shots };
        d.validate()?;
        Ok(d)
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }

    /// At least 8 points, counts within shots, and phases covering one period π
    /// (range plus mean spacing).
    pub fn validate(&self) -> Result<()> {
        let n = self.phases.len();
        let mut errs = Vec::new();
        if self.even_counts.len() != n || self.total_shots.len() != n {
            errs.push(format!(
                "column lengths differ: {} phases, {} counts, {} shots",
                n,
                self.even_counts.len(),
                self.total_shots.len()
            ));
        }
        if n < 8 {
            errs.push(format!("need at least 8 phase points (got {n})"));
        }
        if self.phases.iter().any(|p| !p.is_finite()) {
            errs.push("phases must be finite".into());
        }
        for (i, (&k, &s)) in self.even_counts.iter().zip(&self.total_shots).enumerate() {
            if s == 0 || k > s {
                errs.push(format!("point {i}: need 0 <= even_counts <= shots and shots > 0 (got {k}/{s})"));
            }
        }
        if n >= 2 && errs.is_empty() {
            let lo = self.phases.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = self.phases.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let span = (hi - lo) * n as f64 / (n - 1) as f64;
            if span < PI - 1e-12 {
                errs.push(format!("phases span {span:.4} rad, less than one parity period"));
            }
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(errs))
        }
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        for i in 0..self.len() {
            w.serialize(CsvRow {
                phase_rad: self.phases[i],
                even_counts: self.even_counts[i],
                shots: self.total_shots[i],
            })?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let mut r = csv::Reader::from_path(path)?;
        let mut d = Self { phases: Vec::new(), even_counts: Vec::new(), total_shots: Vec::new() };
        for row in r.deserialize() {
            let row: CsvRow = row?;
            d.phases.push(row.phase_rad);
            d.even_counts.push(row.even_counts);
            d.total_shots.push(row.shots);
        }
        d.validate()?;
        Ok(d)
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        let d: Self = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        d.validate()?;
        Ok(d)
    }
}

/// Binomial parity data drawn from the fringe model.
pub fn synthesize_parity(
    c: f64,
    c0: f64,
    phi0: f64,
    phases: &[f64],
    shots_per_point: u64,
    rng: &mut ChaCha8Rng,
) -> Result<ParityDataset> {
    let mut counts = Vec::with_capacity(phases.len());
    for &phi in phases {
        let p = model_probability(c, c0, phi0, phi);
        if !(-1e-12..=1.0 + 1e-12).contains(&p) {
            return Err(Error::InvalidParameter(format!("model probability {p} at φ = {phi} outside [0, 1]")));
        }
        let b =
            Binomial::new(shots_per_point, p.clamp(0.0, 1.0)).map_err(|e| Error::InvalidParameter(e.to_string()))?;
        counts.push(b.sample(rng));
    }
    ParityDataset::new(phases.to_vec(), counts, vec![shots_per_point; phases.len()])
}

/// [`synthesize_parity`] with a fresh generator seeded by `seed`.
pub fn synthesize_parity_seeded(
    c: f64,
    c0: f64,
    phi0: f64,
    phases: &[f64],
    shots_per_point: u64,
    seed: u64,
) -> Result<ParityDataset> {
    synthesize_parity(c, c0, phi0, phases, shots_per_point, &mut ChaCha8Rng::seed_from_u64(seed))
}
