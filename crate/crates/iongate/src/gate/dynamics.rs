// Copyright 2026 IonGate Contributors
// SPDX-License-Identifier: Apache-2.0

use rayon::prelude::*;
use serde::Serialize;

use super::coherent::run_plan;
use super::config::GateConfig;
use super::plan::bell_plan;
use super::sequence::{run_bell_sequence, signs, SequenceOptions};
use crate::budget::noise::NoiseParams;
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DynamicsPoint {
    pub t_r: f64,
    pub down_down: f64,
    pub flip: f64,
    pub up_up: f64,
}

/// Evenly spaced t_R grid on [0, t_max] with `n` points.
pub fn t_r_grid(t_max: f64, n: usize) -> Vec<f64> {
    if n < 2 {
        return vec![t_max];
    }
    (0..n).map(|i| t_max * i as f64 / (n - 1) as f64).collect()
}

/// Populations at the end of the sequence against total Raman duration, by
/// master-equation integration.
pub fn population_dynamics(
    cfg: &GateConfig,
    noise: &NoiseParams,
    t_r: &[f64],
    opts: &SequenceOptions,
) -> Result<Vec<DynamicsPoint>> {
    t_r.par_iter()
        .map(|&t| {
            let o = SequenceOptions { raman_duration: Some(t), ..opts.clone() };
            let out = run_bell_sequence(cfg, noise, &o)?;
            let p = out.populations;
            Ok(DynamicsPoint { t_r: t, down_down: p.down_down, flip: p.flip, up_up: p.up_up })
        })
        .collect()
}

/// Closed-form populations for rectangular first-order pulses from the ground state.
pub fn population_dynamics_analytic(
    cfg: &GateConfig,
    t_r: &[f64],
    opts: &SequenceOptions,
) -> Result<Vec<DynamicsPoint>> {
    t_r.iter()
        .map(|&t| {
            let plan = bell_plan(cfg, t, &opts.echo);
            let r = run_plan(cfg, &plan, cfg.rabi, signs(opts.swap_ions))?;
            Ok(DynamicsPoint {
                t_r: t,
                down_down: r[(0, 0)].re,
                flip: r[(1, 1)].re + r[(2, 2)].re,
                up_up: r[(3, 3)].re,
            })
        })
        .collect()
}
