// Copyright 2026 IonGate Contributors
// SPDX-License-Identifier: Apache-2.0

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dataset::{synthesize_parity, uniform_phases, ParityDataset};
use super::fit::{fit_least_squares, fit_ml_binomial, FitResult};
use crate::error::{Error, Result};

/// Default number of analysis phases per fringe.
pub const DEFAULT_PHASE_POINTS: usize = 16;

/// Generating parameters of a synthetic fringe ensemble.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FringeParams {
    pub c: f64,
    #[serde(default)]
    pub c0: f64,
    #[serde(default)]
    pub phi0: f64,
    pub phases: Vec<f64>,
    pub shots_per_point: u64,
}

impl FringeParams {
    pub fn uniform(c: f64, shots_per_point: u64) -> Self {
        Self { c, c0: 0.0, phi0: 0.0, phases: uniform_phases(DEFAULT_PHASE_POINTS), shots_per_point }
    }
}

/// Ensemble mean and standard error of a fitted-minus-true quantity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BiasEstimate {
    pub mean: f64,
    pub std_err: f64,
    pub failures: usize,
}

impl BiasEstimate {
    fn from_samples(xs: &[f64], failures: usize) -> Self {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
        Self { mean, std_err: (var / n).sqrt(), failures }
    }

    /// |mean| within `k` standard errors of zero.
    pub fn consistent_with_zero(&self, k: f64) -> bool {
        self.mean.abs() <= k * self.std_err
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiasStudy {
    pub n_datasets: usize,
    pub ml_bias: BiasEstimate,
    pub ls_bias: BiasEstimate,
}

/// Maximum-likelihood and least-squares fits of one dataset.
type FitPair = (Option<FitResult>, Option<FitResult>);

/// Generator for dataset `index` of an ensemble seeded by `seed`.
pub fn dataset_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Synthesize `n_datasets` fringes and fit each with both methods.
pub fn bias_study(params: &FringeParams, n_datasets: usize, seed: u64) -> Result<BiasStudy> {
    if n_datasets < 2 {
        return Err(Error::InvalidParameter("bias study needs at least 2 datasets".into()));
    }
    let fits: Vec<FitPair> = (0..n_datasets as u64)
        .into_par_iter()
        .map(|i| -> Result<_> {
            let d = synthesize_parity(
                params.c,
                params.c0,
                params.phi0,
                &params.phases,
                params.shots_per_point,
                &mut dataset_rng(seed, i),
            )?;
            Ok((fit_ml_binomial(&d).ok(), fit_least_squares(&d).ok()))
        })
        .collect::<Result<_>>()?;
    let collect = |pick: fn(&FitPair) -> Option<&FitResult>| {
        let xs: Vec<f64> = fits.iter().filter_map(|f| pick(f).map(|r| r.c - params.c)).collect();
        if xs.len() < 2 {
            return Err(Error::Fit(format!("only {} of {n_datasets} fits succeeded", xs.len())));
        }
        Ok(BiasEstimate::from_samples(&xs, n_datasets - xs.len()))
    };
    Ok(BiasStudy { n_datasets, ml_bias: collect(|f| f.0.as_ref())?, ls_bias: collect(|f| f.1.as_ref())? })
}

/// Parametric-bootstrap standard errors (C, C0, φ0) of a maximum-likelihood fit.
pub fn bootstrap_ml(data: &ParityDataset, fit: &FitResult, n_boot: usize, seed: u64) -> Result<[f64; 3]> {
    if n_boot < 2 {
        return Err(Error::InvalidParameter("bootstrap needs at least 2 resamples".into()));
    }
    let shots = &data.total_shots;
    let samples: Vec<[f64; 3]> = (0..n_boot as u64)
        .into_par_iter()
        .filter_map(|i| {
            let mut rng = dataset_rng(seed, i);
            let counts: Option<Vec<u64>> = data
                .phases
                .iter()
                .zip(shots)
                .map(|(&phi, &n)| {
                    let p = fit.probability(phi).clamp(0.0, 1.0);
                    rand_distr::Binomial::new(n, p).ok().map(|b| rand_distr::Distribution::sample(&b, &mut rng))
                })
                .collect();
            let d = ParityDataset { phases: data.phases.clone(), even_counts: counts?, total_shots: shots.clone() };
            let f = fit_ml_binomial(&d).ok()?;
            let mut dphi = f.phi0 - fit.phi0;
            dphi -= std::f64::consts::PI * (dphi / std::f64::consts::PI).round();
            Some([f.c, f.c0, dphi])
        })
        .collect();
    if samples.len() < 2 {
        return Err(Error::Fit("bootstrap fits failed".into()));
    }
    let n = samples.len() as f64;
    let mut out = [0.0; 3];
    for (j, o) in out.iter_mut().enumerate() {
        let m = samples.iter().map(|s| s[j]).sum::<f64>() / n;
        *o = (samples.iter().map(|s| (s[j] - m).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    }
    Ok(out)
}
