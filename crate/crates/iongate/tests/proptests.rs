// Copyright 2026 IonGate Contributors
// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::PI;

use iongate::budget::{dephasing_error, heating_error, rayleigh_error, thermal_error, AlphaTable};
use iongate::config::{builtin_profile, ExperimentConfig};
use iongate::qdyn::state::thermal_mode;
use iongate::qdyn::*;
use iongate::rbm::depolarizing_survival;
use iongate::readout::{build_spam_map, correct_populations};
use iongate::spinecho::{epsilon_se, SpinEchoConfig};
use iongate::tomography::{fit_ml_binomial, synthesize_parity_seeded, uniform_phases};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn spam_map_is_stochastic_and_invertible(d in 0.0..0.2f64, u in 0.0..0.2f64, a in 0.0..1.0f64, b in 0.0..1.0f64) {
        let map = build_spam_map(d, u).unwrap();
        for j in 0..3 {
            let s: f64 = (0..3).map(|i| map.matrix[i][j]).sum();
            prop_assert!((s - 1.0).abs() < 1e-14);
            prop_assert!((0..3).all(|i| map.matrix[i][j] >= 0.0));
        }
        let p0 = a * b;
        let p2 = (1.0 - a) * b;
        let truth = [p0, 1.0 - p0 - p2, p2];
        let back = correct_populations(map.apply(truth), &map).unwrap();
        for k in 0..3 {
            prop_assert!((back[k] - truth[k]).abs() < 1e-9);
        }
    }

    #[test]
    fn spin_echo_swap_symmetric_and_bounded(df in -2e4..2e4f64, t in 0.0..6e-4f64) {
        let cfg = SpinEchoConfig { delta_f: df, ..SpinEchoConfig::default() };
        let a = epsilon_se(&cfg, t).unwrap();
        let b = epsilon_se(&cfg.swapped(), t).unwrap();
        prop_assert!((a - b).abs() < 1e-12);
        prop_assert!((-1e-14..=1.0).contains(&a));
    }

    #[test]
    fn error_formulas_monotone(x in 1e-3..10.0f64, k in 1u32..5, t in 1e-6..1e-3f64) {
        prop_assert!(heating_error(2.0 * x, t, k) > heating_error(x, t, k));
        prop_assert!(heating_error(x, t, k + 1) < heating_error(x, t, k));
        prop_assert!(rayleigh_error(2.0 * x, t) > rayleigh_error(x, t));
        prop_assert!(thermal_error(0.1, 2.0 * x) > thermal_error(0.1, x));
        let a = AlphaTable::default();
        let kk = [1, 2, 4][(k as usize - 1) % 3];
        prop_assert!(dephasing_error(x, 2.0 * t, kk, &a).unwrap() > dephasing_error(x, t, kk, &a).unwrap());
    }

    #[test]
    fn depolarizing_survival_decays(eps in 0.0..0.25f64, l in 1u32..2000) {
        let s = depolarizing_survival(eps, l);
        prop_assert!((0.5..=1.0).contains(&s));
        prop_assert!(depolarizing_survival(eps, l + 1) <= s);
    }

    #[test]
    fn config_roundtrip_with_perturbed_seeds(seed in 0..=i64::MAX as u64, rb_seed in 0..=i64::MAX as u64, scale in 0.5..2.0f64) {
        let mut cfg = builtin_profile("table1-100us").unwrap();
        cfg.seed = seed;
        cfg.rb.seed = rb_seed;
        cfg.noise.heating_rate *= scale;
        let back = ExperimentConfig::from_toml(&cfg.to_toml().unwrap()).unwrap();
        prop_assert_eq!(&back, &cfg);
        prop_assert_eq!(back.hash().unwrap(), cfg.hash().unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn fitted_fringe_is_physical(c_true in 0.5..1.0f64, phi0 in 0.0..PI, seed in 0u64..1000, shots in 20u64..500) {
        let d = synthesize_parity_seeded(c_true, 0.0, phi0, &uniform_phases(16), shots, seed).unwrap();
        let f = fit_ml_binomial(&d).unwrap();
        prop_assert!(f.c >= 0.0);
        prop_assert!((0.0..PI).contains(&f.phi0));
        prop_assert!(f.c.abs() + f.c0.abs() <= 1.0 + 1e-12);
        for phi in uniform_phases(32) {
            let p = f.probability(phi);
            prop_assert!((-1e-11..=1.0 + 1e-11).contains(&p), "p = {}", p);
        }
    }

    #[test]
    fn lindblad_evolution_preserves_trace(g in 0.0..5e4f64, gamma in 0.0..2e3f64, nbar in 0.0..0.5f64, t in 1e-6..5e-5f64) {
        let spec = HilbertSpec::new(1, 6, &["com"]).unwrap();
        let ops = build_operators(&spec).unwrap();
        let h = Hamiltonian::constant(ops.sx[0].matmul(&ops.a[0].add(&ops.adag[0])).scale(c(g)));
        let l = LindbladChannel::new(ops.a[0].scale(c(gamma.sqrt())), "decay");
        let spin = DMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(0.0)]);
        let s0 = QuantumState::product(spec.clone(), &spin, &[thermal_mode(6, nbar)]).unwrap();
        let out = evolve(&s0, &h, &[l], &[t], &IntegratorConfig::default());
        if let Ok(out) = out {
            let st = &out[0];
            prop_assert!((st.trace() - c(1.0)).norm() < 1e-9);
            prop_assert!(st.hermiticity_defect() < 1e-10);
            prop_assert!(st.min_eigenvalue() > -1e-8);
        } else {
            // Only the truncation guard may reject a run.
            let truncated = matches!(out, Err(iongate::Error::Truncation { .. }));
            prop_assert!(truncated);
        }
    }
}
