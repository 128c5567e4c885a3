// Copyright 2026 IonGate Contributors
// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use super::config::ShapeKind;

/// Amplitude envelope of one gate pulse on [0, duration].
///
/// The smooth ramp is sin²(t/τ) over the first πτ/2 and mirrored at the end.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseShape {
    pub kind: ShapeKind,
    pub ramp_time: f64,
    pub duration: f64,
}

impl PulseShape {
    pub fn new(kind: ShapeKind, ramp_time: f64, duration: f64) -> Self {
        Self { kind, ramp_time, duration }
    }

    pub fn rectangular(duration: f64) -> Self {
        Self::new(ShapeKind::Rectangular, 0.0, duration)
    }

    /// Length of each ramp, πτ/2.
    pub fn ramp_length(&self) -> f64 {
        match self.kind {
            ShapeKind::Rectangular => 0.0,
            ShapeKind::SmoothRamp => FRAC_PI_2 * self.ramp_time,
        }
    }

    /// Envelope at local time `t`; zero outside the pulse.
    pub fn envelope(&self, t: f64) -> f64 {
        if t < 0.0 || t > self.duration {
            return 0.0;
        }
        match self.kind {
            ShapeKind::Rectangular => 1.0,
            ShapeKind::SmoothRamp => {
                if self.ramp_time <= 0.0 {
                    return 1.0;
                }
                let u = t.min(self.duration - t);
                if u >= self.ramp_length() {
                    1.0
                } else {
                    (u / self.ramp_time).sin().powi(2)
                }
            }
        }
    }

    /// Breakpoints where the envelope changes analytic form.
    pub fn breakpoints(&self) -> Vec<f64> {
        let r = self.ramp_length();
        if r > 0.0 && 2.0 * r < self.duration {
            vec![0.0, r, self.duration - r, self.duration]
        } else if r > 0.0 {
            vec![0.0, 0.5 * self.duration, self.duration]
        } else {
            vec![0.0, self.duration]
        }
    }
}
