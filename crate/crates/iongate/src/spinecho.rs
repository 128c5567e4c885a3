// Copyright 2026 IonGate Contributors
// SPDX-License-Identifier: Apache-2.0

//! Two-spin Bell sequence with finite microwave pulses and a static qubit-frequency
//! difference δf, split as ±δf/2 between the ions. Pulse phases are referenced to a
//! frame at the mean qubit frequency.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use nalgebra::{Matrix2, Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::brent_minimize;
use crate::qdyn::C64;

/// Default π/2, π, π/2 pulse phases of the Bell sequence.
pub const BELL_PULSE_PHASES: [f64; 3] = [-FRAC_PI_4, 0.0, FRAC_PI_4];

/// How the echo gaps relate to the pulse durations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum GapLayout {
    /// Each gap lasts t_g/2 and pulses add to the total length.
    #[default]
    ExcludePulses,
    /// Pulse durations are subtracted from the t_g/2 gaps.
    IncludePulses,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpinEchoConfig {
    /// Microwave Rabi frequency Ω_mw, rad/s.
    pub rabi_mw: f64,
    /// Qubit frequency difference δf, Hz.
    pub delta_f: f64,
    /// Phases of the π/2, π and π/2 pulses, rad.
    #[serde(default = "default_phases")]
    pub phases: [f64; 3],
    #[serde(default)]
    pub gap_layout: GapLayout,
}

fn default_phases() -> [f64; 3] {
    BELL_PULSE_PHASES
}

impl Default for SpinEchoConfig {
    fn default() -> Self {
        Self {
            rabi_mw: 2.0 * PI * 82e3,
            delta_f: 4.91e3,
            phases: BELL_PULSE_PHASES,
            gap_layout: GapLayout::ExcludePulses,
        }
    }
}

impl SpinEchoConfig {
    pub fn validate(&self, prefix: &str) -> Vec<String> {
        let mut v = Vec::new();
        if !(self.rabi_mw > 0.0 && self.rabi_mw.is_finite()) {
            v.push(format!("{prefix}rabi_mw must be finite and > 0 (got {})", self.rabi_mw));
        }
        if !self.delta_f.is_finite() {
            v.push(format!("{prefix}delta_f must be finite"));
        }
        if self.phases.iter().any(|p| !p.is_finite()) {
            v.push(format!("{prefix}phases must be finite"));
        }
        v
    }

    fn check(&self) -> Result<()> {
        let v = self.validate("spinecho.");
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(v))
        }
    }

    /// Duration of a pulse of rotation angle `angle`.
    pub fn pulse_duration(&self, angle: f64) -> f64 {
        angle / self.rabi_mw
    }

    /// Ion-exchanged configuration (δf → −δf).
    pub fn swapped(&self) -> Self {
        Self { delta_f: -self.delta_f, ..self.clone() }
    }
}

/// exp(−iT[(Ω/2)(cosφ σx + sinφ σy) + (Δ/2)σz]) with Δ = 2π·detuning and T = angle/Ω.
pub fn mw_pulse(angle: f64, phase: f64, detuning_hz: f64, rabi: f64) -> Matrix2<C64> {
    let t = angle / rabi;
    let hx = rabi / 2.0 * phase.cos();
    let hy = rabi / 2.0 * phase.sin();
    let hz = PI * detuning_hz;
    let h = (hx * hx + hy * hy + hz * hz).sqrt();
    let (c, s) = ((h * t).cos(), (h * t).sin());
    let mi = C64::new(0.0, -s / h);
    // n·σ with σy = [[0, i], [−i, 0]] and σz = diag(−1, 1).
    Matrix2::new(
        C64::new(c, 0.0) + mi * (-hz),
        mi * C64::new(hx, hy),
        mi * C64::new(hx, -hy),
        C64::new(c, 0.0) + mi * hz,
    )
}

/// Ideal rotation R(θ, φ) = exp(−iθ/2(cosφ σx + sinφ σy)).
pub fn rotation(angle: f64, phase: f64) -> Matrix2<C64> {
    let (c, s) = ((angle / 2.0).cos(), (angle / 2.0).sin());
    Matrix2::new(
        C64::new(c, 0.0),
        C64::new(0.0, -s) * C64::from_polar(1.0, phase),
        C64::new(0.0, -s) * C64::from_polar(1.0, -phase),
        C64::new(c, 0.0),
    )
}

/// The same microwave pulse on both ions, detuned by +δf/2 and −δf/2.
pub fn two_ion_pulse(cfg: &SpinEchoConfig, angle: f64, phase: f64) -> Matrix4<C64> {
    mw_pulse(angle, phase, cfg.delta_f / 2.0, cfg.rabi_mw).kronecker(&mw_pulse(
        angle,
        phase,
        -cfg.delta_f / 2.0,
        cfg.rabi_mw,
    ))
}

/// Free precession exp(−i(πδf/2)(σz¹ − σz²)t).
pub fn free_precession(delta_f: f64, t: f64) -> Matrix4<C64> {
    let w = PI * delta_f / 2.0 * t;
    let z = [-1.0, 1.0];
    let mut d = [C64::new(0.0, 0.0); 4];
    for (i, v) in d.iter_mut().enumerate() {
        *v = C64::from_polar(1.0, -w * (z[i >> 1] - z[i & 1]));
    }
    Matrix4::from_diagonal(&Vector4::from_column_slice(&d))
}

/// Ideal phase gate exp(iφ S²/4) with S = σz¹ − σz².
pub fn ideal_gate(phase: f64) -> Matrix4<C64> {
    let one = C64::new(1.0, 0.0);
    let e = C64::from_polar(1.0, phase);
    Matrix4::from_diagonal(&Vector4::new(one, e, e, one))
}

fn gap_length(cfg: &SpinEchoConfig, t_g: f64, before: f64, after: f64) -> f64 {
    match cfg.gap_layout {
        GapLayout::ExcludePulses => t_g / 2.0,
        GapLayout::IncludePulses => {
            (t_g / 2.0 - 0.5 * (cfg.pulse_duration(before) + cfg.pulse_duration(after))).max(0.0)
        }
    }
}

/// Full sequence unitary with the ideal gate applied as two π/4 insertions at the gap midpoints.
pub fn sequence_unitary(cfg: &SpinEchoConfig, t_g: f64) -> Matrix4<C64> {
    let [pa, pb, pc] = cfg.phases;
    let g1 = gap_length(cfg, t_g, FRAC_PI_2, PI);
    let g2 = gap_length(cfg, t_g, PI, FRAC_PI_2);
    let half = |g: f64| free_precession(cfg.delta_f, g / 2.0);
    let gate = ideal_gate(FRAC_PI_4);
    two_ion_pulse(cfg, FRAC_PI_2, pc)
        * half(g2)
        * gate
        * half(g2)
        * two_ion_pulse(cfg, PI, pb)
        * half(g1)
        * gate
        * half(g1)
        * two_ion_pulse(cfg, FRAC_PI_2, pa)
}

/// 1 − |⟨ψ+|U|↓↓⟩|².
pub fn bell_error_of(u: &Matrix4<C64>) -> f64 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let amp = (u[(0, 0)] + u[(3, 0)]) * s;
    1.0 - amp.norm_sqr()
}

/// Spin-echo Bell error ε_SE at gate duration `t_g`.
pub fn epsilon_se(cfg: &SpinEchoConfig, t_g: f64) -> Result<f64> {
    cfg.check()?;
    if !(t_g >= 0.0) {
        return Err(Error::InvalidParameter(format!("t_g must be >= 0 (got {t_g})")));
    }
    Ok(bell_error_of(&sequence_unitary(cfg, t_g)))
}

pub fn simulate_epsilon_se(cfg: &SpinEchoConfig, t_gs: &[f64]) -> Result<Vec<f64>> {
    t_gs.iter().map(|&t| epsilon_se(cfg, t)).collect()
}

/// Largest ε_SE on [t_lo, t_hi], from a grid scan refined by Brent's method.
pub fn first_maximum(cfg: &SpinEchoConfig, t_lo: f64, t_hi: f64, grid: usize) -> Result<(f64, f64)> {
    cfg.check()?;
    if !(t_hi > t_lo && grid >= 3) {
        return Err(Error::InvalidParameter("first_maximum needs t_hi > t_lo and grid >= 3".into()));
    }
    let h = (t_hi - t_lo) / (grid - 1) as f64;
    let ts: Vec<f64> = (0..grid).map(|i| t_lo + h * i as f64).collect();
    let es = simulate_epsilon_se(cfg, &ts)?;
    let (k, _) = es.iter().enumerate().fold((0, f64::NEG_INFINITY), |b, (i, &e)| if e > b.1 { (i, e) } else { b });
    let a = ts[k.saturating_sub(1)];
    let b = ts[(k + 1).min(grid - 1)];
    let (t, neg) = brent_minimize(|t| -bell_error_of(&sequence_unitary(cfg, t)), a, b, 1e-12, 200);
    Ok((t, -neg))
}

/// 1 − |tr(R†U)/2|² of a detuned pulse against the ideal rotation.
pub fn pulse_infidelity(angle: f64, phase: f64, detuning_hz: f64, rabi: f64) -> f64 {
    let u = mw_pulse(angle, phase, detuning_hz, rabi);
    let r = rotation(angle, phase);
    1.0 - ((r.adjoint() * u).trace() / 2.0).norm_sqr()
}
