// Copyright 2026 IonGate Contributors
// SPDX-License-Identifier: Apache-2.0

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Negative corrected populations above this are clamped to zero.
pub const NEGATIVE_CLAMP: f64 = 1e-6;

/// Column-stochastic map from true classes [↓↓, flip, ↑↑] to observed
/// classes [0, 1, 2 bright] for independent per-ion errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpamMap {
    pub eps_down: f64,
    pub eps_up: f64,
    pub matrix: [[f64; 3]; 3],
    pub condition_number: f64,
}

impl SpamMap {
    pub fn matrix3(&self) -> Matrix3<f64> {
        Matrix3::from_fn(|i, j| self.matrix[i][j])
    }

    pub fn apply(&self, populations: [f64; 3]) -> [f64; 3] {
        let v = self.matrix3() * Vector3::from(populations);
        [v[0], v[1], v[2]]
    }
}

/// Build the map from per-qubit errors: ε↓ = P(↓ reads bright), ε↑ = P(↑ reads dark).
pub fn build_spam_map(eps_down: f64, eps_up: f64) -> Result<SpamMap> {
    for (name, e) in [("eps_down", eps_down), ("eps_up", eps_up)] {
        if !(0.0..0.5).contains(&e) {
            return Err(Error::InvalidParameter(format!("{name} must lie in [0, 0.5) (got {e})")));
        }
    }
    let (d, u) = (eps_down, eps_up);
    let m = Matrix3::new(
        (1.0 - d) * (1.0 - d),
        (1.0 - d) * u,
        u * u,
        2.0 * d * (1.0 - d),
        (1.0 - d) * (1.0 - u) + d * u,
        2.0 * u * (1.0 - u),
        d * d,
        d * (1.0 - u),
        (1.0 - u) * (1.0 - u),
    );
    let sv = m.singular_values();
    let smin = sv.min();
    if smin <= 1e-12 {
        return Err(Error::InvalidParameter("SPAM map is singular".into()));
    }
    Ok(SpamMap {
        eps_down,
        eps_up,
        matrix: std::array::from_fn(|i| std::array::from_fn(|j| m[(i, j)])),
        condition_number: sv.max() / smin,
    })
}

/// Invert the map, clamp tiny negatives to zero and renormalise.
pub fn correct_populations(observed: [f64; 3], map: &SpamMap) -> Result<[f64; 3]> {
    let inv =
        map.matrix3().try_inverse().ok_or_else(|| Error::InvalidParameter("SPAM map is not invertible".into()))?;
    let v = inv * Vector3::from(observed);
    let mut out = [v[0], v[1], v[2]];
    for x in &mut out {
        if *x < -NEGATIVE_CLAMP {
            return Err(Error::InvalidParameter(format!("corrected population {x:.3e} is negative beyond tolerance")));
        }
        *x = x.max(0.0);
    }
    let s: f64 = out.iter().sum();
    if s <= 0.0 {
        return Err(Error::InvalidParameter("corrected populations vanish".into()));
    }
    Ok(out.map(|x| x / s))
}
