// Copyright 2026 IonGate Contributors
// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::{FRAC_PI_2, PI};

use iongate::budget::{heating_error, thermal_error, NoiseParams};
use iongate::gate::sequence::run_bell_ket;
use iongate::gate::thermal::thermal_weights;
use iongate::gate::{
    calibrate_rabi, calibrated, run_bell_sequence, spectator_thermal_error, GateConfig, SequenceOptions,
};

#[test]
fn calibrated_rabi_matches_closed_form() {
    let opts = SequenceOptions::default();
    for (t_g, k) in [(100e-6, 2u32), (50e-6, 1), (80e-6, 4)] {
        let cfg = GateConfig::new(t_g, k);
        let expect = PI * (k as f64 / t_g) / (cfg.eta_gate * (k as f64).sqrt());
        let cal = calibrate_rabi(&cfg, &opts).unwrap();
        assert!((cal.rabi / expect - 1.0).abs() < 1e-6, "K = {k}: {} vs {expect}", cal.rabi);
        assert!(cal.bell_error < 1e-9);
    }
}

#[test]
fn noise_free_gate_makes_bell_state() {
    let opts = SequenceOptions::default();
    let cfg = calibrated(&GateConfig::new(100e-6, 2), &opts).unwrap();
    let out = run_bell_sequence(&cfg, &NoiseParams::zero(), &opts).unwrap();
    assert!(out.bell_error() < 1e-9, "{}", out.bell_error());
    assert!((out.populations.down_down - 0.5).abs() < 1e-8);
    assert!((out.populations.up_up - 0.5).abs() < 1e-8);
    assert!((out.populations.sum() - 1.0).abs() < 1e-10);
    assert!((out.geometric_phase_differential.abs() - FRAC_PI_2).abs() < 1e-6);
}

#[test]
fn density_and_ket_propagation_agree() {
    let opts = SequenceOptions::default();
    let cfg = calibrated(&GateConfig::new(100e-6, 2), &opts).unwrap();
    let out = run_bell_sequence(&cfg, &NoiseParams::zero(), &opts).unwrap();
    let ket = run_bell_ket(&cfg, 0, 20, cfg.rabi, &opts).unwrap();
    let rho = &out.final_spin_state.rho;
    for i in 0..4 {
        for j in 0..4 {
            assert!((rho[(i, j)] - ket[(i, j)]).norm() < 1e-7, "({i}, {j})");
        }
    }
}

#[test]
fn ion_swap_leaves_populations_unchanged() {
    let opts = SequenceOptions::default();
    let cfg = calibrated(&GateConfig::new(100e-6, 2), &opts).unwrap();
    let mut noise = NoiseParams::zero();
    noise.heating_rate = 500.0;
    let a = run_bell_sequence(&cfg, &noise, &opts).unwrap();
    let b = run_bell_sequence(&cfg, &noise, &SequenceOptions { swap_ions: true, ..opts }).unwrap();
    assert!((a.bell_fidelity - b.bell_fidelity).abs() < 1e-9);
    assert!((a.populations.flip - b.populations.flip).abs() < 1e-9);
}

#[test]
fn heating_error_follows_formula() {
    let opts = SequenceOptions::default();
    let cfg = calibrated(&GateConfig::new(100e-6, 2), &opts).unwrap();
    let mut noise = NoiseParams::zero();
    noise.heating_rate = 20.0;
    let e = run_bell_sequence(&cfg, &noise, &opts).unwrap().bell_error();
    let expect = heating_error(20.0, 100e-6, 2);
    assert!((e / expect - 1.0).abs() < 0.05, "{e} vs {expect}");
}

#[test]
fn thermal_weights_are_geometric() {
    let nbar = 0.3;
    let w = thermal_weights(nbar);
    let q = nbar / (1.0 + nbar);
    for (n, p) in w.iter().enumerate().take(6) {
        assert!((p - q.powi(n as i32) / (1.0 + nbar)).abs() < 1e-12);
    }
    let mean: f64 = w.iter().enumerate().map(|(n, p)| n as f64 * p).sum::<f64>() / w.iter().sum::<f64>();
    assert!((mean - nbar).abs() < 1e-8);
    assert_eq!(thermal_weights(0.0), vec![1.0]);
}

#[test]
fn spectator_thermal_point() {
    let opts = SequenceOptions::default();
    let cfg = calibrated(&GateConfig::new(100e-6, 2), &opts).unwrap();
    let p = spectator_thermal_error(&cfg, 0.2, &opts).unwrap();
    assert!((p.analytic - thermal_error(cfg.eta_spec, 0.2)).abs() < 1e-15);
    assert!((p.numeric / p.analytic - 1.0).abs() < 0.10, "{} vs {}", p.numeric, p.analytic);
}

#[test]
fn rescaled_gate_keeps_loop_count() {
    let cfg = GateConfig::new(100e-6, 2);
    let short = cfg.with_duration(25e-6);
    assert_eq!(short.loops, 2);
    assert!((short.delta_g - 2.0 / 25e-6).abs() < 1e-6);
    assert!((short.rabi / short.seed_rabi() - 1.0).abs() < 1e-12);
    let mut bad = cfg.clone();
    bad.eta_gate = 1.5;
    assert!(bad.validate("gate.").iter().any(|s| s.starts_with("gate.eta_gate")));
}
