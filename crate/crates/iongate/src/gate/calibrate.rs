// Copyright 2026 IonGate Contributors
// SPDX-License-Identifier: Apache-2.0

use nalgebra::SMatrix;
use serde::Serialize;

use super::coherent::{bell_error, run_plan};
use super::config::{GateConfig, LambDicke, ShapeKind};
use super::plan::{bell_plan, EchoModel};
use super::sequence::{ket_bell_error, max_displacement_sq, run_bell_ket, signs, SequenceOptions, MIN_FOCK_CUTOFF};
use crate::error::{Error, Result};
use crate::numerics::{brent_minimize, brent_root, nelder_mead};
use crate::qdyn::state::fock_cutoff_for;
use crate::qdyn::C64;

/// Largest noise-free Bell error accepted from a calibration.
pub const CALIBRATION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Calibration {
    pub rabi: f64,
    pub detuning_trim: f64,
    /// Noise-free Bell error at the calibrated point, from the numeric sequence.
    pub bell_error: f64,
    pub evaluations: usize,
}

impl Calibration {
    pub fn apply(&self, cfg: &GateConfig) -> GateConfig {
        GateConfig { rabi: self.rabi, detuning_trim: self.detuning_trim, ..cfg.clone() }
    }
}

fn analytic(cfg: &GateConfig) -> bool {
    cfg.shape == ShapeKind::Rectangular && cfg.lamb_dicke == LambDicke::FirstOrder
}

fn calibration_options(opts: &SequenceOptions) -> SequenceOptions {
    SequenceOptions { echo: EchoModel::Ideal, raman_duration: None, lightshift: false, ..opts.clone() }
}

fn noise_free_spin(cfg: &GateConfig, rabi: f64, trim: f64, opts: &SequenceOptions) -> Result<SMatrix<C64, 4, 4>> {
    let c = GateConfig { detuning_trim: trim, ..cfg.clone() };
    let opts = calibration_options(opts);
    if analytic(&c) {
        let plan = bell_plan(&c, c.t_g, &EchoModel::Ideal);
        return run_plan(&c, &plan, rabi, signs(opts.swap_ions));
    }
    let cutoff =
        opts.fock_cutoff.unwrap_or_else(|| fock_cutoff_for(0.0, max_displacement_sq(&c, rabi), MIN_FOCK_CUTOFF));
    run_bell_ket(&c, 0, cutoff, rabi, &opts)
}

/// Noise-free Bell error from the motional ground state, closed form where available.
pub fn noise_free_error(cfg: &GateConfig, rabi: f64, trim: f64, opts: &SequenceOptions) -> Result<f64> {
    Ok(bell_error(&noise_free_spin(cfg, rabi, trim, opts)?))
}

/// P↓↓ − P↑↑, which changes sign at the correct geometric phase.
fn imbalance(cfg: &GateConfig, rabi: f64, trim: f64, opts: &SequenceOptions) -> Result<f64> {
    let r = noise_free_spin(cfg, rabi, trim, opts)?;
    Ok(r[(0, 0)].re - r[(3, 3)].re)
}

/// Smallest Ω giving a noise-free Bell error below [`CALIBRATION_TOL`].
///
/// Rectangular first-order gates need only Ω. Shaped or full Lamb-Dicke gates also
/// adjust `detuning_trim` so that the motional loops close.
pub fn calibrate_rabi(cfg: &GateConfig, opts: &SequenceOptions) -> Result<Calibration> {
    calibrate_rabi_to(cfg, opts, CALIBRATION_TOL)
}

/// [`calibrate_rabi`] with an explicit acceptance threshold on the noise-free error.
pub fn calibrate_rabi_to(cfg: &GateConfig, opts: &SequenceOptions, tol: f64) -> Result<Calibration> {
    cfg.check()?;
    let seed = cfg.seed_rabi();
    let mut evals = 0usize;
    let mut failure: Option<Error> = None;
    let mut cost = |rabi: f64, trim: f64| -> f64 {
        evals += 1;
        match noise_free_error(cfg, rabi, trim, opts) {
            Ok(e) => e,
            Err(err) => {
                failure.get_or_insert(err);
                1.0
            }
        }
    };
    let (lo, hi) = (0.8 * seed, 1.25 * seed);
    let (mut rabi, mut err) = brent_minimize(|r| cost(r, 0.0), lo, hi, 1e-12, 200);
    let mut trim = 0.0;
    if err > 0.1 * tol.min(CALIBRATION_TOL) && !analytic(cfg) {
        let (x, fx, _) = nelder_mead(|x| cost(x[0] * seed, x[1]), &[rabi / seed, 0.0], &[1e-3, 1e-3], 1e-16, 2000);
        if fx < err {
            rabi = x[0] * seed;
            trim = x[1];
            err = fx;
        }
    }
    if let Some(e) = failure.take() {
        return Err(Error::Calibration(format!("sequence evaluation failed during search: {e}")));
    }
    // The error is quadratic in the phase, so polish Ω on the population imbalance,
    // which is linear in it.
    let (a, b) = (rabi * (1.0 - 1e-5), rabi * (1.0 + 1e-5));
    if let (Ok(fa), Ok(fb)) = (imbalance(cfg, a, trim, opts), imbalance(cfg, b, trim, opts)) {
        if fa * fb < 0.0 {
            let root = brent_root(|r| imbalance(cfg, r, trim, opts).unwrap_or(f64::NAN), a, b, 1e-14 * rabi, 100)?;
            let e = noise_free_error(cfg, root, trim, opts)?;
            evals += 3;
            if e <= err.max(0.1 * CALIBRATION_TOL) {
                rabi = root;
                err = e;
            }
        }
    }
    let verified = GateConfig { rabi, detuning_trim: trim, ..cfg.clone() };
    let check_opts = calibration_options(opts);
    let cutoff = check_opts
        .fock_cutoff
        .unwrap_or_else(|| fock_cutoff_for(0.0, max_displacement_sq(&verified, rabi), MIN_FOCK_CUTOFF));
    let numeric = ket_bell_error(&verified, 0, cutoff, rabi, &check_opts)?;
    if numeric > tol {
        return Err(Error::Calibration(format!(
            "no Ω in [{lo:.6e}, {hi:.6e}] rad/s reaches Bell error {tol:e}: best Ω = {rabi:.9e}, trim = {trim:.3e}, \
             search error {err:.3e}, numeric error {numeric:.3e}"
        )));
    }
    Ok(Calibration { rabi, detuning_trim: trim, bell_error: numeric, evaluations: evals })
}

/// Calibrate and return the updated configuration.
pub fn calibrated(cfg: &GateConfig, opts: &SequenceOptions) -> Result<GateConfig> {
    Ok(calibrate_rabi(cfg, opts)?.apply(cfg))
}
