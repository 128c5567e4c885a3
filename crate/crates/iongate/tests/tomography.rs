// Copyright 2026 IonGate Contributors
// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::PI;

use approx::assert_relative_eq;
use iongate::tomography::{
    bell_fidelity, bias_study, bootstrap_ml, fit_least_squares, fit_ml_binomial, log_likelihood, model_probability,
    parity, synthesize_parity_seeded, uniform_phases, Corrections, FitMethod, FringeParams, Measured, ParityDataset,
};
use iongate::Error;
use statrs::distribution::{Binomial, Discrete};

fn noiseless(c: f64, c0: f64, phi0: f64, shots: u64) -> ParityDataset {
    let phases = uniform_phases(16);
    let counts = phases.iter().map(|&p| (model_probability(c, c0, phi0, p) * shots as f64).round() as u64).collect();
    ParityDataset::new(phases, counts, vec![shots; 16]).unwrap()
}

#[test]
fn log_likelihood_matches_statrs() {
    let d = synthesize_parity_seeded(0.9, 0.02, 0.3, &uniform_phases(12), 200, 5).unwrap();
    let (c, c0, phi0) = (0.85, 0.01, 0.25);
    let expect: f64 = d
        .phases
        .iter()
        .zip(&d.even_counts)
        .zip(&d.total_shots)
        .map(|((&phi, &k), &n)| Binomial::new(model_probability(c, c0, phi0, phi), n).unwrap().ln_pmf(k))
        .sum();
    assert_relative_eq!(log_likelihood(&d, c, c0, phi0), expect, max_relative = 1e-10);
    assert_eq!(log_likelihood(&d, 0.9, 0.2, 0.0), f64::NEG_INFINITY);
}

#[test]
fn noiseless_data_recovers_parameters() {
    let d = noiseless(0.95, 0.01, 0.4, 1_000_000);
    for f in [fit_ml_binomial(&d).unwrap(), fit_least_squares(&d).unwrap()] {
        assert!((f.c - 0.95).abs() < 1e-5, "{:?}", f.method);
        assert!((f.c0 - 0.01).abs() < 1e-5);
        assert!((f.phi0 - 0.4).abs() < 1e-5);
    }
}

#[test]
fn phase_is_canonical() {
    // A negative-contrast fringe shifted by π/2 is the same curve.
    let d = noiseless(0.8, 0.0, 2.9, 100_000);
    let f = fit_ml_binomial(&d).unwrap();
    assert!(f.c >= 0.0 && (0.0..PI).contains(&f.phi0), "{f:?}");
    assert!((f.phi0 - 2.9).abs() < 1e-3);
    for phi in d.phases.iter() {
        assert!((f.probability(*phi) - model_probability(0.8, 0.0, 2.9, *phi)).abs() < 1e-3);
    }
}

#[test]
fn ml_likelihood_not_below_least_squares() {
    for seed in 0..20 {
        let d = synthesize_parity_seeded(0.995, 0.0, 0.0, &uniform_phases(16), 1000, seed).unwrap();
        let ml = fit_ml_binomial(&d).unwrap();
        let ls = fit_least_squares(&d).unwrap();
        assert_eq!(ml.method, FitMethod::MaximumLikelihood);
        assert!(ml.log_likelihood >= ls.log_likelihood - 1e-9, "seed {seed}");
        assert!(ml.c.abs() + ml.c0.abs() <= 1.0 + 1e-12);
    }
}

#[test]
fn full_contrast_data_stays_feasible() {
    let phases = uniform_phases(16);
    let counts: Vec<u64> =
        phases.iter().map(|&p| (model_probability(1.0, 0.0, 0.0, p) * 500.0).round() as u64).collect();
    let d = ParityDataset::new(phases, counts, vec![500; 16]).unwrap();
    let f = fit_ml_binomial(&d).unwrap();
    assert!(f.at_boundary);
    for phi in uniform_phases(64) {
        let p = f.probability(phi);
        assert!((-1e-11..=1.0 + 1e-11).contains(&p), "{p}");
    }
}

#[test]
fn observed_information_error_matches_bootstrap() {
    let d = synthesize_parity_seeded(0.9, 0.0, 0.5, &uniform_phases(16), 1000, 77).unwrap();
    let f = fit_ml_binomial(&d).unwrap();
    let boot = bootstrap_ml(&d, &f, 400, 3).unwrap();
    assert!((boot[0] / f.c_err - 1.0).abs() < 0.2, "C: {} vs {}", boot[0], f.c_err);
    assert!((boot[2] / f.phi0_err - 1.0).abs() < 0.2, "phi0: {} vs {}", boot[2], f.phi0_err);
    assert!(bootstrap_ml(&d, &f, 1, 3).is_err());
}

#[test]
fn ml_bias_shrinks_ls_bias_positive() {
    let s = bias_study(&FringeParams::uniform(0.995, 1000), 200, 42).unwrap();
    assert!(s.ml_bias.consistent_with_zero(3.0), "{:?}", s.ml_bias);
    assert!(s.ls_bias.mean > 0.0 && s.ls_bias.mean > s.ml_bias.mean);
    let again = bias_study(&FringeParams::uniform(0.995, 1000), 200, 42).unwrap();
    assert_eq!(s, again);
}

#[test]
fn dataset_file_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let d = synthesize_parity_seeded(0.97, 0.01, 0.2, &uniform_phases(16), 300, 9).unwrap();
    let csv = dir.path().join("d.csv");
    let json = dir.path().join("d.json");
    d.write_csv(&csv).unwrap();
    d.write_json(&json).unwrap();
    assert_eq!(ParityDataset::read_csv(&csv).unwrap(), d);
    assert_eq!(ParityDataset::read_json(&json).unwrap(), d);
    let header = std::fs::read_to_string(&csv).unwrap();
    assert!(header.starts_with("phase_rad,even_counts,shots\n"));
}

#[test]
fn dataset_validation_errors() {
    let few = ParityDataset::new(uniform_phases(4), vec![1; 4], vec![2; 4]);
    assert!(matches!(few, Err(Error::Validation(_))));
    let mut counts = vec![5u64; 16];
    counts[3] = 11;
    assert!(ParityDataset::new(uniform_phases(16), counts, vec![10; 16]).is_err());
    let narrow: Vec<f64> = (0..16).map(|i| i as f64 * 0.1).collect();
    assert!(ParityDataset::new(narrow, vec![5; 16], vec![10; 16]).is_err());
    assert!(ParityDataset::new(uniform_phases(16), vec![5; 15], vec![10; 16]).is_err());
}

#[test]
fn fidelity_composition() {
    let f = bell_fidelity(
        Measured::new(0.9953, 0.0006),
        Measured::new(0.9997, 0.0002),
        Corrections { spam: Some(1.7e-3), se: Some(Measured::new(1.4e-3, 0.1e-3)) },
    );
    assert_relative_eq!(f.fidelity, 0.9975, epsilon = 1e-12);
    assert_relative_eq!(f.gate_error, 1.1e-3, epsilon = 1e-12);
    assert_relative_eq!(f.fidelity_err, 0.5 * (0.0006f64.hypot(0.0002)), epsilon = 1e-15);
    assert_relative_eq!(f.gate_error_err, f.fidelity_err.hypot(0.1e-3), epsilon = 1e-15);
    assert_eq!(f.corrected_for.len(), 2);
    assert!(f.warnings.is_empty());
    let neg = bell_fidelity(
        Measured::exact(1.0),
        Measured::exact(1.0),
        Corrections { spam: None, se: Some(Measured::exact(1e-3)) },
    );
    assert!(!neg.warnings.is_empty());
}

#[test]
fn parity_of_populations() {
    assert_relative_eq!(parity([0.5, 0.0, 0.0, 0.5]).unwrap(), 1.0);
    assert_relative_eq!(parity([0.4, 0.1, 0.05, 0.45]).unwrap(), 0.7, epsilon = 1e-15);
    assert!(parity([0.5, 0.5, 0.5, 0.0]).is_err());
}
