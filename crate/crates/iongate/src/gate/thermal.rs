// Copyright 2026 IonGate Contributors
// SPDX-License-Identifier: Apache-2.0

//! Bell error from thermal motion, by averaging noise-free pure-state runs over the
//! Fock distribution.

use rayon::prelude::*;
use serde::Serialize;

use super::config::{GateConfig, LambDicke};
use super::sequence::{ket_bell_error, max_displacement_sq, SequenceOptions, MIN_FOCK_CUTOFF};
use crate::budget::formulas::thermal_error;
use crate::error::{Error, Result};
use crate::numerics::laguerre;
use crate::qdyn::state::{fock_cutoff_for, thermal_tail};

/// Thermal weight ignored beyond the last simulated Fock level.
pub const THERMAL_TAIL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThermalPoint {
    pub nbar: f64,
    pub numeric: f64,
    pub analytic: f64,
}

/// Untruncated thermal weights p_n for n = 0..=n_max with tail below [`THERMAL_TAIL_TOL`].
pub fn thermal_weights(nbar: f64) -> Vec<f64> {
    if nbar <= 0.0 {
        return vec![1.0];
    }
    let q = nbar / (nbar + 1.0);
    let mut w = Vec::new();
    let mut n = 0;
    loop {
        w.push(q.powi(n as i32) / (nbar + 1.0));
        if thermal_tail(n, nbar) < THERMAL_TAIL_TOL {
            return w;
        }
        n += 1;
    }
}

fn check_nbar(nbar: f64) -> Result<()> {
    if !(nbar >= 0.0 && nbar.is_finite()) {
        return Err(Error::InvalidParameter(format!("nbar must be finite and >= 0 (got {nbar})")));
    }
    Ok(())
}

/// Spectator (stretch) mode in Fock state n rescales the gate coupling by L_n(η_s²).
/// `cfg` must be calibrated with the spectator in its ground state.
pub fn spectator_thermal_error(cfg: &GateConfig, nbar: f64, opts: &SequenceOptions) -> Result<ThermalPoint> {
    check_nbar(nbar)?;
    let eta2 = cfg.eta_spec * cfg.eta_spec;
    let w = thermal_weights(nbar);
    let cutoff =
        opts.fock_cutoff.unwrap_or_else(|| fock_cutoff_for(0.0, max_displacement_sq(cfg, cfg.rabi), MIN_FOCK_CUTOFF));
    let errs: Vec<f64> = (0..w.len())
        .into_par_iter()
        .map(|n| ket_bell_error(cfg, 0, cutoff, cfg.rabi * laguerre(n, 0.0, eta2), opts))
        .collect::<Result<_>>()?;
    let numeric = w.iter().zip(&errs).map(|(p, e)| p * e).sum();
    Ok(ThermalPoint { nbar, numeric, analytic: thermal_error(cfg.eta_spec, nbar) })
}

/// Gate mode in a thermal state with the full Lamb-Dicke coupling. `cfg` must be
/// calibrated at n̄ = 0 with `lamb_dicke = full`.
pub fn gate_mode_thermal_error(cfg: &GateConfig, nbar: f64, opts: &SequenceOptions) -> Result<ThermalPoint> {
    check_nbar(nbar)?;
    if cfg.lamb_dicke != LambDicke::Full {
        return Err(Error::InvalidParameter("gate-mode thermal error needs lamb_dicke = full".into()));
    }
    let w = thermal_weights(nbar);
    let alpha = max_displacement_sq(cfg, cfg.rabi).sqrt();
    let errs: Vec<f64> = (0..w.len())
        .into_par_iter()
        .map(|n| {
            let mut margin = 10 + (6.0 * alpha * ((n + 1) as f64).sqrt()).ceil() as usize;
            loop {
                match ket_bell_error(cfg, n, (n + margin).max(MIN_FOCK_CUTOFF), cfg.rabi, opts) {
                    Err(Error::Truncation { .. }) if margin < 200 => margin *= 2,
                    other => return other,
                }
            }
        })
        .collect::<Result<_>>()?;
    let numeric = w.iter().zip(&errs).map(|(p, e)| p * e).sum();
    Ok(ThermalPoint { nbar, numeric, analytic: thermal_error(cfg.eta_gate, nbar) })
}
