// Copyright 2026 IonGate Contributors
// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::{FRAC_PI_2, PI};

use iongate::spinecho::{
    epsilon_se, first_maximum, mw_pulse, pulse_infidelity, rotation, sequence_unitary, GapLayout, SpinEchoConfig,
};
use nalgebra::Matrix2;
use num_complex::Complex64 as C64;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// exp(−iHT) from the matrix exponential, with σy = [[0, i], [−i, 0]] and σz = diag(−1, 1).
fn pulse_by_expm(angle: f64, phase: f64, detuning_hz: f64, rabi: f64) -> Matrix2<C64> {
    let sx = Matrix2::new(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0));
    let sy = Matrix2::new(c(0.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(0.0, 0.0));
    let sz = Matrix2::new(c(-1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0));
    let h =
        sx * c(rabi / 2.0 * phase.cos(), 0.0) + sy * c(rabi / 2.0 * phase.sin(), 0.0) + sz * c(PI * detuning_hz, 0.0);
    (h * c(0.0, -angle / rabi)).exp()
}

fn max_diff(a: &Matrix2<C64>, b: &Matrix2<C64>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

#[test]
fn mw_pulse_matches_matrix_exponential() {
    let rabi = 2.0 * PI * 82e3;
    for &(angle, phase, det) in
        &[(FRAC_PI_2, -0.785, 2455.0), (PI, 0.0, -2455.0), (FRAC_PI_2, 1.3, 0.0), (2.0, 2.5, 3e4)]
    {
        let d = max_diff(&mw_pulse(angle, phase, det, rabi), &pulse_by_expm(angle, phase, det, rabi));
        assert!(d < 1e-12, "angle {angle} phase {phase} det {det}: {d}");
    }
}

#[test]
fn resonant_pulse_is_ideal_rotation() {
    let rabi = 1e5;
    for phase in [0.0, 0.4, -1.1] {
        assert!(max_diff(&mw_pulse(FRAC_PI_2, phase, 0.0, rabi), &rotation(FRAC_PI_2, phase)) < 1e-13);
        assert!(pulse_infidelity(PI, phase, 0.0, rabi) < 1e-14);
    }
    assert!(pulse_infidelity(PI, 0.0, 5e3, rabi) > 0.0);
}

#[test]
fn value_at_100us() {
    let e = epsilon_se(&SpinEchoConfig::default(), 100e-6).unwrap();
    assert!((e - 1.37e-3).abs() < 0.01e-3, "{e}");
}

#[test]
fn ion_swap_symmetry() {
    let cfg = SpinEchoConfig::default();
    for t in [10e-6, 77e-6, 200e-6, 431e-6] {
        let a = epsilon_se(&cfg, t).unwrap();
        let b = epsilon_se(&cfg.swapped(), t).unwrap();
        assert!((a - b).abs() < 1e-14, "{t}: {a} vs {b}");
    }
}

#[test]
fn no_detuning_gives_perfect_sequence() {
    let cfg = SpinEchoConfig { delta_f: 0.0, ..SpinEchoConfig::default() };
    for t in [0.0, 50e-6, 300e-6] {
        assert!(epsilon_se(&cfg, t).unwrap() < 1e-14);
    }
}

#[test]
fn fast_pulses_suppress_error() {
    let slow = SpinEchoConfig::default();
    let fast = SpinEchoConfig { rabi_mw: slow.rabi_mw * 1e3, ..slow.clone() };
    let e = epsilon_se(&fast, 100e-6).unwrap();
    assert!(e < 1e-5 && e < epsilon_se(&slow, 100e-6).unwrap() / 100.0, "{e}");
}

#[test]
fn first_maximum_location() {
    let (t, e) = first_maximum(&SpinEchoConfig::default(), 150e-6, 260e-6, 23).unwrap();
    assert!((150e-6..=260e-6).contains(&t));
    assert!((e - 1.8e-3).abs() <= 0.18e-3, "{e}");
    for dt in [-2e-6, 2e-6] {
        assert!(epsilon_se(&SpinEchoConfig::default(), t + dt).unwrap() <= e + 1e-15);
    }
}

#[test]
fn sequence_is_unitary_for_both_layouts() {
    for gap_layout in [GapLayout::ExcludePulses, GapLayout::IncludePulses] {
        let cfg = SpinEchoConfig { gap_layout, ..SpinEchoConfig::default() };
        let u = sequence_unitary(&cfg, 120e-6);
        let d = (u.adjoint() * u - nalgebra::Matrix4::<C64>::identity()).norm();
        assert!(d < 1e-12, "{d}");
    }
}

#[test]
fn rejects_bad_inputs() {
    let bad = SpinEchoConfig { rabi_mw: 0.0, ..SpinEchoConfig::default() };
    assert!(epsilon_se(&bad, 1e-4).is_err());
    assert!(epsilon_se(&SpinEchoConfig::default(), -1e-6).is_err());
    assert!(first_maximum(&SpinEchoConfig::default(), 2e-4, 1e-4, 10).is_err());
}
