// Copyright 2026 IonGate Contributors
// SPDX-License-Identifier: Apache-2.0

use approx::assert_relative_eq;
use iongate::readout::{
    build_spam_map, calibrate_shelve_error, correct_populations, estimate_spam, optimize_thresholds,
    simulate_detection, spam_exact, ReadoutModel, TrueClass,
};
use iongate::tomography::dataset_rng;
use statrs::distribution::{DiscreteCDF, Poisson};

#[test]
fn decay_probability_matches_exponential() {
    let m = ReadoutModel::default();
    assert_relative_eq!(m.decay_probability(), 1.0 - (-1.9f64 / 1168.0).exp(), max_relative = 1e-12);
    let stable = ReadoutModel { shelf_lifetime: f64::INFINITY, ..m };
    assert_eq!(stable.decay_probability(), 0.0);
}

#[test]
fn ideal_class_probs_are_poisson() {
    let m = ReadoutModel::ideal(90.0, 0.5, 1.9).unwrap();
    let [t0, t1] = m.thresholds;
    for (class, bright) in [(TrueClass::DownDown, 0.0), (TrueClass::Flip, 1.0), (TrueClass::UpUp, 2.0)] {
        let pois = Poisson::new((0.5 + 90.0 * bright) * 1.9).unwrap();
        let c0 = pois.cdf(t0 - 1);
        let c1 = pois.cdf(t1 - 1);
        let expect = [c0, c1 - c0, 1.0 - c1];
        let got = m.class_probs(class);
        for k in 0..3 {
            assert!((got[k] - expect[k]).abs() < 1e-12, "{class:?} {k}: {} vs {}", got[k], expect[k]);
        }
    }
}

#[test]
fn monte_carlo_frequencies_match_exact() {
    let m = ReadoutModel::default();
    let shots = 200_000u64;
    for class in TrueClass::ALL {
        let mut rng = dataset_rng(31, class.index() as u64);
        let mut freq = [0u64; 3];
        for _ in 0..shots {
            freq[simulate_detection(class, &m, &mut rng).class] += 1;
        }
        let p = m.class_probs(class);
        for k in 0..3 {
            let sd = (p[k] * (1.0 - p[k]) / shots as f64).sqrt().max(1.0 / shots as f64);
            let f = freq[k] as f64 / shots as f64;
            assert!((f - p[k]).abs() <= 4.0 * sd, "{class:?} class {k}: {f} vs {}", p[k]);
        }
    }
}

#[test]
fn detection_is_deterministic_per_seed() {
    let m = ReadoutModel::default();
    let draw = |seed| {
        let mut rng = dataset_rng(seed, 0);
        (0..50).map(|_| simulate_detection(TrueClass::Flip, &m, &mut rng).counts).collect::<Vec<_>>()
    };
    assert_eq!(draw(5), draw(5));
    assert_ne!(draw(5), draw(6));
}

#[test]
fn map_is_stochastic_and_inverts() {
    let map = build_spam_map(1.2e-3, 2.3e-3).unwrap();
    for j in 0..3 {
        let s: f64 = (0..3).map(|i| map.matrix[i][j]).sum();
        assert_relative_eq!(s, 1.0, epsilon = 1e-15);
    }
    let truth = [0.497, 0.006, 0.497];
    let back = correct_populations(map.apply(truth), &map).unwrap();
    for k in 0..3 {
        assert!((back[k] - truth[k]).abs() < 1e-13);
    }
    assert!(map.condition_number >= 1.0);
    assert!(build_spam_map(0.5, 0.0).is_err());
    assert!(correct_populations([0.0, 0.5, 0.5], &build_spam_map(0.1, 0.1).unwrap()).is_err());
}

#[test]
fn thresholds_separate_classes() {
    let m = ReadoutModel::default();
    let t = optimize_thresholds(&m).unwrap();
    assert!(t[0] < t[1]);
    assert!((t[0] as f64) > 1.0 && (t[0] as f64) < 90.0 * 1.9);
    assert!((t[1] as f64) > 90.0 * 1.9 && (t[1] as f64) < 180.0 * 1.9);
}

#[test]
fn exact_spam_matches_target() {
    let m = ReadoutModel::default();
    let (d, u) = spam_exact(&m);
    assert!((0.5 * (d + u) - 1.74e-3).abs() < 1e-8, "{}", 0.5 * (d + u));
    let s = calibrate_shelve_error(&m, 1.74e-3).unwrap();
    assert!((s - m.shelve_error).abs() < 1e-8);
    assert!(calibrate_shelve_error(&m, 1e-5).is_err());
}

#[test]
fn spam_estimate_is_unbiased() {
    let m = ReadoutModel::default();
    let (d, u) = spam_exact(&m);
    let e = estimate_spam(&m, 200_000, 17).unwrap();
    assert!((e.eps_down - d).abs() <= 4.0 * e.eps_down_err, "{} vs {d}", e.eps_down);
    assert!((e.eps_up - u).abs() <= 4.0 * e.eps_up_err, "{} vs {u}", e.eps_up);
    assert_eq!(estimate_spam(&m, 10_000, 4).unwrap(), estimate_spam(&m, 10_000, 4).unwrap());
}

#[test]
fn validation_names_fields() {
    let m = ReadoutModel { thresholds: [10, 5], prep_error: 0.7, ..ReadoutModel::default() };
    let v = m.validate("readout.");
    assert!(v.iter().any(|s| s.starts_with("readout.thresholds")));
    assert!(v.iter().any(|s| s.starts_with("readout.prep_error")));
    assert!(m.check().is_err());
}
