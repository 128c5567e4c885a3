// Copyright 2026 IonGate Contributors
// SPDX-License-Identifier: Apache-2.0

use std::sync::Arc;

use approx::assert_abs_diff_eq;
use iongate::qdyn::state::{basis_ket, fock_mode, max_abs_diff, psi_plus, thermal_mode, thermal_populations};
use iongate::qdyn::*;
use iongate::Error;
use nalgebra::{DMatrix, DVector};

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

#[test]
fn pauli_z_on_two_spins_commute_and_product_is_diagonal() {
    let ops = build_operators(&HilbertSpec::spins(2)).unwrap();
    let comm = ops.sz[0].commutator(&ops.sz[1]);
    assert_eq!(comm.max_abs(), 0.0);
    let prod = ops.sz[0].matmul(&ops.sz[1]).to_dense();
    for r in 0..4 {
        for k in 0..4 {
            if r == k {
                assert_abs_diff_eq!(prod[(r, k)].norm(), 1.0);
            } else {
                assert_eq!(prod[(r, k)].norm(), 0.0);
            }
        }
    }
}

#[test]
fn number_operator_diagonal_per_fock_block() {
    let spec = HilbertSpec::new(1, 5, &["com"]).unwrap();
    let ops = build_operators(&spec).unwrap();
    let n = ops.num[0].to_dense();
    for block in 0..2 {
        for k in 0..6 {
            let i = block * 6 + k;
            assert_eq!(n[(i, i)], c(k as f64));
        }
    }
}

#[test]
fn canonical_commutator_below_cutoff() {
    let spec = HilbertSpec::gate(20).unwrap();
    let ops = build_operators(&spec).unwrap();
    let comm = ops.a[0].commutator(&ops.adag[0]).to_dense();
    let md = spec.mode_dim();
    for i in 0..spec.dim() {
        let level = i % md;
        if level < 20 {
            assert!((comm[(i, i)] - c(1.0)).norm() < 1e-12);
        }
        for k in 0..spec.dim() {
            if k != i {
                assert!(comm[(i, k)].norm() < 1e-12);
            }
        }
    }
}

#[test]
fn pauli_squares_are_identity() {
    let ops = build_operators(&HilbertSpec::gate(3).unwrap()).unwrap();
    for j in 0..2 {
        for s in [&ops.sx[j], &ops.sy[j], &ops.sz[j]] {
            assert!(s.matmul(s).sub(&ops.identity).max_abs() < 1e-15);
        }
        // [σx, σy] = 2iσz
        let lhs = ops.sx[j].commutator(&ops.sy[j]);
        let rhs = ops.sz[j].scale(C64::new(0.0, 2.0));
        assert!(lhs.sub(&rhs).max_abs() < 1e-15);
        // σ+ raises ↓ to ↑
        assert!(ops.sp[j].sub(&ops.sx[j].add(&ops.sy[j].scale(C64::new(0.0, 1.0))).scale(c(0.5))).max_abs() < 1e-15);
    }
}

#[test]
fn oversize_space_rejected() {
    assert!(matches!(HilbertSpec::new(12, 10, &["com"]), Err(Error::DimensionOverflow { .. })));
}

#[test]
fn zero_hamiltonian_leaves_state_unchanged() {
    let spec = HilbertSpec::gate(20).unwrap();
    let mut spin = DMatrix::from_element(4, 4, c(0.1));
    for i in 0..4 {
        spin[(i, i)] = c(0.25);
    }
    let s0 = QuantumState::product(spec.clone(), &spin, &[thermal_mode(20, 0.3)]).unwrap();
    let out = evolve(&s0, &Hamiltonian::zero(spec.dim()), &[], &[1e-3, 5e-2], &IntegratorConfig::default()).unwrap();
    let diff = max_abs_diff(&out[1].rho, &s0.rho);
    assert!(diff < 1e-12, "diff {diff}");
}

#[test]
fn motional_dephasing_coherence_decays_at_one_over_tau() {
    let spec = HilbertSpec::new(0, 3, &["com"]).unwrap();
    let ops = build_operators(&spec).unwrap();
    let tau = 0.2;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let psi = DVector::from_vec(vec![c(s), c(s), c(0.0), c(0.0)]);
    let s0 = QuantumState::from_ket(spec.clone(), &psi).unwrap();
    let l = LindbladChannel::new(ops.num[0].scale(c((2.0f64 / tau).sqrt())), "motional dephasing");
    let times = [0.05, 0.1, 0.3];
    let out = evolve(&s0, &Hamiltonian::zero(spec.dim()), &[l], &times, &IntegratorConfig::default()).unwrap();
    for (st, t) in out.iter().zip(times) {
        let expect = 0.5 * (-t / tau).exp();
        assert!((st.rho[(0, 1)].re - expect).abs() < 1e-9 * 0.5, "t={t}: {} vs {expect}", st.rho[(0, 1)]);
    }
}

#[test]
fn rabi_oscillation_matches_closed_form() {
    let spec = HilbertSpec::spins(1);
    let ops = build_operators(&spec).unwrap();
    let omega = 2.0 * std::f64::consts::PI * 82e3;
    let h = Hamiltonian::constant(ops.sx[0].scale(c(omega / 2.0)));
    let s0 = QuantumState::from_ket(spec.clone(), &basis_ket(2, 0)).unwrap();
    let times: Vec<f64> = (1..=20).map(|k| k as f64 * 1e-6).collect();
    let cfg = IntegratorConfig::adaptive(1e-11, 1e-13);
    let out = evolve(&s0, &h, &[], &times, &cfg).unwrap();
    for (st, t) in out.iter().zip(&times) {
        let p = (omega * t / 2.0).sin().powi(2);
        assert!((st.population(1) - p).abs() < 1e-8, "t={t}");
    }
}

#[test]
fn unitary_limit_preserves_purity() {
    let spec = HilbertSpec::gate(15).unwrap();
    let ops = build_operators(&spec).unwrap();
    let s_op = ops.sz[0].sub(&ops.sz[1]);
    let coupling = s_op.matmul(&ops.a[0]);
    let delta = 2.0 * std::f64::consts::PI * 2e4;
    let g = 3e4;
    let h = Hamiltonian::zero(spec.dim())
        .with_term(coupling.clone(), Arc::new(move |t| C64::from_polar(g, -delta * t)))
        .with_term(coupling.adjoint(), Arc::new(move |t| C64::from_polar(g, delta * t)));
    let plus = DVector::from_element(4, c(0.5));
    let spin = &plus * plus.adjoint();
    let s0 = QuantumState::product(spec.clone(), &spin, &[fock_mode(15, 0)]).unwrap();
    let out = evolve(&s0, &h, &[], &[2.5e-5, 5e-5, 1e-4], &IntegratorConfig::default()).unwrap();
    for st in &out {
        assert!((purity(st) - 1.0).abs() < 1e-8);
        assert!((st.trace() - c(1.0)).norm() < 1e-9);
        assert!(st.hermiticity_defect() < 1e-10);
    }
}

#[test]
fn fixed_step_halving_converges() {
    let spec = HilbertSpec::gate(12).unwrap();
    let ops = build_operators(&spec).unwrap();
    let coupling = ops.sz[0].sub(&ops.sz[1]).matmul(&ops.a[0]);
    let delta = 2.0 * std::f64::consts::PI * 2e4;
    let g = 2.2e4;
    let h = Hamiltonian::zero(spec.dim())
        .with_term(coupling.clone(), Arc::new(move |t| C64::from_polar(g, -delta * t)))
        .with_term(coupling.adjoint(), Arc::new(move |t| C64::from_polar(g, delta * t)));
    let plus = DVector::from_element(4, c(0.5));
    let s0 = QuantumState::product(spec.clone(), &(&plus * plus.adjoint()), &[fock_mode(12, 0)]).unwrap();
    let reference = evolve(&s0, &h, &[], &[5e-5], &IntegratorConfig::adaptive(1e-12, 1e-14)).unwrap();
    let run = |dt: f64| evolve(&s0, &h, &[], &[5e-5], &IntegratorConfig::fixed(dt)).unwrap().remove(0);
    let f1 = max_abs_diff(&run(2e-7).rho, &reference[0].rho);
    let f2 = max_abs_diff(&run(1e-7).rho, &reference[0].rho);
    assert!(f2 < 1e-9, "halved-step deviation {f2}");
    assert!(f2 < f1);
}

#[test]
fn fidelity_examples() {
    let spec = HilbertSpec::spins(2);
    let bell = QuantumState::from_ket(spec.clone(), &psi_plus()).unwrap();
    assert_abs_diff_eq!(fidelity_with_pure(&bell, &psi_plus()).unwrap(), 1.0, epsilon = 1e-15);
    let mixed = QuantumState::new(spec, DMatrix::identity(4, 4) * c(0.25), 0.0).unwrap();
    assert_abs_diff_eq!(fidelity_with_pure(&mixed, &psi_plus()).unwrap(), 0.25, epsilon = 1e-15);
    assert!(fidelity_with_pure(&mixed, &DVector::from_element(3, c(1.0))).is_err());
}

#[test]
fn partial_trace_of_product_recovers_factors() {
    let spec = HilbertSpec::gate(6).unwrap();
    let plus = DVector::from_element(4, c(0.5));
    let spin = &plus * plus.adjoint();
    let mode = thermal_mode(6, 0.4);
    let s = QuantumState::product(spec, &spin, std::slice::from_ref(&mode)).unwrap();
    let rs = partial_trace(&s, &[Subsystem::Spin(0), Subsystem::Spin(1)]).unwrap();
    assert!(max_abs_diff(&rs.rho, &spin) < 1e-15);
    let rm = partial_trace(&s, &[Subsystem::Mode(0)]).unwrap();
    assert!(max_abs_diff(&rm.rho, &mode) < 1e-15);
    let r1 = partial_trace(&s, &[Subsystem::Spin(1)]).unwrap();
    assert_eq!(r1.dim(), 2);
    assert!((r1.rho[(0, 1)] - c(0.5)).norm() < 1e-15);
    assert!(von_neumann_entropy(&rs) < 1e-10);
}

#[test]
fn thermal_populations_are_normalised_geometric() {
    let p = thermal_populations(30, 0.5);
    assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    assert!((p[1] / p[0] - 1.0 / 3.0).abs() < 1e-14);
    let mean: f64 = p.iter().enumerate().map(|(n, x)| n as f64 * x).sum();
    assert!((mean - 0.5).abs() < 1e-8);
}

#[test]
fn truncation_violation_is_rejected() {
    let spec = HilbertSpec::new(0, 4, &["com"]).unwrap();
    let ops = build_operators(&spec).unwrap();
    let h = Hamiltonian::constant(ops.a[0].add(&ops.adag[0]).scale(c(1e5)));
    let s0 = QuantumState::new(spec, fock_mode(4, 0), 0.0).unwrap();
    let r = evolve(&s0, &h, &[], &[1e-4], &IntegratorConfig::default());
    assert!(matches!(r, Err(Error::Truncation { .. })), "{r:?}");
}

#[test]
fn non_hermitian_hamiltonian_rejected() {
    let spec = HilbertSpec::new(0, 4, &["com"]).unwrap();
    let ops = build_operators(&spec).unwrap();
    let h = Hamiltonian::constant(ops.a[0].clone());
    let s0 = QuantumState::new(spec, fock_mode(4, 0), 0.0).unwrap();
    assert!(evolve(&s0, &h, &[], &[1e-6], &IntegratorConfig::default()).is_err());
}

#[test]
fn ket_and_density_evolution_agree() {
    let spec = HilbertSpec::gate(10).unwrap();
    let ops = build_operators(&spec).unwrap();
    let coupling = ops.sz[0].sub(&ops.sz[1]).matmul(&ops.a[0]);
    let delta = 2.0 * std::f64::consts::PI * 2e4;
    let h = Hamiltonian::zero(spec.dim())
        .with_term(coupling.clone(), Arc::new(move |t| C64::from_polar(2e4, -delta * t)))
        .with_term(coupling.adjoint(), Arc::new(move |t| C64::from_polar(2e4, delta * t)));
    let mut psi = DVector::zeros(spec.dim());
    psi[0] = c(0.5f64.sqrt());
    psi[spec.mode_dim()] = c(0.5f64.sqrt());
    let s0 = QuantumState::from_ket(spec.clone(), &psi).unwrap();
    let cfg = IntegratorConfig::adaptive(1e-11, 1e-13);
    let rho = evolve(&s0, &h, &[], &[3e-5], &cfg).unwrap().remove(0);
    let ket = evolve_ket(&spec, &psi, 0.0, &h, &[3e-5], &cfg).unwrap().remove(0);
    let from_ket = &ket * ket.adjoint();
    assert!(max_abs_diff(&rho.rho, &from_ket) < 1e-9);
}
