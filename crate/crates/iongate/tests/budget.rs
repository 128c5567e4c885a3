// Copyright 2026 IonGate Contributors
// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::PI;

use approx::assert_relative_eq;
use iongate::budget::multigate::fit_quadratic;
use iongate::budget::{
    budget_table, contrast_loss_error, crosstalk_error, dephasing_error, heating_error, intensity_drift_error,
    multi_gate_error, multi_gate_study, raman_error, rayleigh_error, spin_dephasing_beta, spin_dephasing_error,
    thermal_error, AlphaTable, ErrorBudget, CHANNELS,
};
use iongate::config::builtin_profile;
use iongate::Error;

#[test]
fn heating_matches_hand_value() {
    // 2.2 quanta/s over 100 us with two loops.
    assert_relative_eq!(heating_error(2.2, 100e-6, 2), 5.5e-5, max_relative = 1e-12);
    assert_relative_eq!(heating_error(1000.0, 50e-6, 1), 0.025, max_relative = 1e-12);
}

#[test]
fn thermal_matches_hand_value() {
    let eta: f64 = 0.094;
    let nbar = 0.05;
    let expect = 2.4674011002723395 * eta * eta * eta * eta * nbar * 1.1;
    assert_relative_eq!(thermal_error(eta, nbar), expect, max_relative = 1e-12);
    assert_eq!(thermal_error(eta, 0.0), 0.0);
}

#[test]
fn dephasing_uses_tabulated_alpha() {
    let a = AlphaTable::default();
    let e = dephasing_error(0.2, 100e-6, 2, &a).unwrap();
    assert_relative_eq!(e, a.get(2).unwrap() * 100e-6 / 0.2, max_relative = 1e-12);
    assert!((e - 1.485e-4).abs() < 0.5e-6, "{e}");
    assert_eq!(dephasing_error(f64::INFINITY, 100e-6, 2, &a).unwrap(), 0.0);
    assert!(matches!(dephasing_error(0.2, 100e-6, 7, &a), Err(Error::InvalidParameter(_))));
}

#[test]
fn spin_dephasing_roundtrip() {
    let beta = spin_dephasing_beta(0.2e-3, 100e-6).unwrap();
    assert_relative_eq!(beta, 2.0002e4, max_relative = 1e-4);
    assert_relative_eq!(spin_dephasing_error(beta, 100e-6), 0.2e-3, max_relative = 1e-10);
    let c: f64 = 1.0 - beta * 1e-8;
    assert_relative_eq!(spin_dephasing_error(beta, 100e-6), (1.0 - c * c) / 2.0, max_relative = 1e-12);
    assert!(spin_dephasing_beta(0.6, 1e-4).is_err());
}

#[test]
fn scattering_formulas() {
    assert_relative_eq!(raman_error(10.0, 1e-4, 0.75), 1.5e-3, max_relative = 1e-12);
    let g = 5.0;
    let t = 1e-4;
    assert_relative_eq!(rayleigh_error(g, t), (1.0 - (-2.0 * g * t).exp()) / 2.0, max_relative = 1e-12);
    assert_relative_eq!(contrast_loss_error(0.9953), 2.35e-3, max_relative = 1e-9);
}

#[test]
fn drift_and_crosstalk() {
    assert_relative_eq!(intensity_drift_error(0.005).unwrap(), PI * PI / 4.0 * 2.5e-5, max_relative = 1e-12);
    assert!(intensity_drift_error(0.06).is_err());
    let x = crosstalk_error(0.2e3, 36.5e3).unwrap();
    assert_relative_eq!(x, PI * PI / 4.0 * (0.2 / 36.5f64).powi(2), max_relative = 1e-12);
    assert!((x - 7.4e-5).abs() < 0.05e-5);
    assert!(crosstalk_error(1.0, 0.0).is_err());
}

#[test]
fn table1_budget_rows() {
    let p = builtin_profile("table1-100us").unwrap();
    let b = budget_table(&p.noise, &p.gate, &p.alphas).unwrap();
    for c in CHANNELS {
        assert!(b.get(c).is_some(), "missing channel {c}");
    }
    let sum: f64 = b.entries.iter().map(|(_, v)| v).sum();
    assert_relative_eq!(b.total, sum, max_relative = 1e-14);
    let rows = b.table_rows();
    assert!((rows[0].1 - 0.4e-3).abs() < 0.01e-3, "scattering {}", rows[0].1);
    assert!((rows[1].1 - 0.2e-3).abs() < 0.01e-3, "motional {}", rows[1].1);
    assert!((rows[2].1 - 0.2e-3).abs() < 1e-9, "spin dephasing {}", rows[2].1);
    assert!((b.total - 0.9e-3).abs() <= 0.1e-3, "total {}", b.total);
}

#[test]
fn budget_rejects_negative_entries() {
    let r = ErrorBudget::from_entries(vec![("a".into(), 1e-4), ("b".into(), -1e-6)]);
    assert!(matches!(r, Err(Error::InvalidParameter(_))));
}

#[test]
fn budget_grows_with_heating() {
    let p = builtin_profile("table1-100us").unwrap();
    let base = budget_table(&p.noise, &p.gate, &p.alphas).unwrap().total;
    let mut noise = p.noise.clone();
    noise.heating_rate *= 2.0;
    let hot = budget_table(&noise, &p.gate, &p.alphas).unwrap().total;
    assert_relative_eq!(hot - base, heating_error(p.noise.heating_rate, p.gate.t_g, p.gate.loops), max_relative = 1e-9);
}

#[test]
fn multigate_model_and_fit() {
    let per = 1.5e-3;
    let d = 0.005;
    let q = PI * PI / 4.0 * d * d;
    assert_relative_eq!(multi_gate_error(3, per, d), 3.0 * per + 9.0 * q, max_relative = 1e-12);
    let ns = [1.0, 3.0, 5.0, 7.0];
    let ys: Vec<f64> = ns.iter().map(|n| 1e-4 + 2e-3 * n + 3e-5 * n * n).collect();
    let f = fit_quadratic(&ns, &ys).unwrap();
    assert_relative_eq!(f.quadratic, 3e-5, max_relative = 1e-8);
    assert_relative_eq!(f.linear, 2e-3, max_relative = 1e-8);
    let s = multi_gate_study(9, per, d).unwrap();
    assert_eq!(s.n_gates, vec![1, 3, 5, 7, 9]);
    assert!(s.simulated.windows(2).all(|w| w[1] > w[0]));
}
