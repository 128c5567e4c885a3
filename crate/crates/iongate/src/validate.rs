// Copyright 2026 IonGate Contributors
// SPDX-License-Identifier: Apache-2.0

//! Deterministic invariant suite: closed forms against master-equation oracles,
//! statistical estimators against their generating models, and configuration
//! plumbing. Each module invariant maps to one or more checks in [`coverage`].

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DVector;
use serde::Serialize;

use crate::budget::{
    alpha_numeric, budget_table, crosstalk_error, dephasing_error, dephasing_oracle, heating_error, heating_oracle,
    intensity_drift_error, model_curves, multi_gate_study, raman_coherence_factor, raman_error, raman_oracle,
    rayleigh_error, rayleigh_oracle, spin_dephasing_error, thermal_error, AlphaTable, NoiseParams, ALPHA_SAMPLES,
};
use crate::config::{builtin_profile, builtin_profiles, ExperimentConfig};
use crate::error::{Error, Result};
use crate::gate::calibrate::noise_free_error;
use crate::gate::dynamics::t_r_grid;
use crate::gate::{
    calibrated, population_dynamics, population_dynamics_analytic, run_bell_sequence, spectator_thermal_error,
    GateConfig, SequenceOptions,
};
use crate::qdyn::state::{fock_mode, max_abs_diff};
use crate::qdyn::{
    build_operators, evolve, purity, von_neumann_entropy, Hamiltonian, HilbertSpec, IntegratorConfig, QuantumState, C64,
};
use crate::rbm::{depolarizing_survival, exact_survival, fit_decay, simulate_rb, NoiseModel1Q, RbPlan};
use crate::readout::{
    build_spam_map, correct_populations, estimate_spam, shelf_decay_bias, spam_exact, uncorrected_inflation,
    GateRunEmulation, ReadoutModel,
};
use crate::spinecho::{epsilon_se, first_maximum, SpinEchoConfig};
use crate::tomography::{
    bell_fidelity, bias_study, fit_least_squares, fit_ml_binomial, synthesize_parity_seeded, uniform_phases,
    Corrections, FringeParams, Measured, ParityDataset,
};

/// How a check compares its value with the target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    /// |value − target| ≤ tolerance.
    Absolute,
    /// |value/target − 1| ≤ tolerance.
    Relative,
    /// value ≤ target.
    AtMost,
    /// value ≥ target.
    AtLeast,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub id: String,
    pub module: String,
    pub description: String,
    pub rule: Rule,
    pub value: f64,
    pub target: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckResult {
    fn new(id: &str, description: &str, rule: Rule, value: f64, target: f64, tolerance: f64) -> Self {
        let passed = match rule {
            Rule::Absolute => (value - target).abs() <= tolerance,
            Rule::Relative => (value / target - 1.0).abs() <= tolerance,
            Rule::AtMost => value <= target,
            Rule::AtLeast => value >= target,
        };
        let module = id.split('.').next().unwrap_or(id).to_string();
        Self { id: id.into(), module, description: description.into(), rule, value, target, tolerance, passed }
    }

    fn flag(id: &str, description: &str, ok: bool) -> Self {
        Self::new(id, description, Rule::AtLeast, f64::from(u8::from(ok)), 1.0, 0.0)
    }

    /// One line: `PASS id value=… target=…  description`.
    pub fn line(&self) -> String {
        let tol = match self.rule {
            Rule::Absolute => format!(" ±{:.3e}", self.tolerance),
            Rule::Relative => format!(" ±{:.1}%", 100.0 * self.tolerance),
            Rule::AtMost => " (max)".into(),
            Rule::AtLeast => " (min)".into(),
        };
        format!(
            "{} {:<28} value={:<12.5e} target={:.5e}{}  {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.value,
            self.target,
            tol,
            self.description
        )
    }
}

/// One invariant of one module and the checks that cover it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageEntry {
    pub module: &'static str,
    pub invariant: &'static str,
    pub checks: Vec<&'static str>,
}

/// Invariant-to-check map for every module.
pub fn coverage() -> Vec<CoverageEntry> {
    let e = |module, invariant, checks: &[&'static str]| CoverageEntry { module, invariant, checks: checks.to_vec() };
    vec![
        e("qdyn", "trace preserved to 1e-9 along trajectories", &["qdyn.trace"]),
        e("qdyn", "hermiticity preserved to 1e-10 along trajectories", &["qdyn.hermiticity"]),
        e("qdyn", "unitary limit keeps tr rho^2 constant to 1e-8", &["qdyn.unitary_purity"]),
        e(
            "qdyn",
            "top two Fock levels below 1e-8 or the run is rejected",
            &["qdyn.truncation_accepted", "qdyn.truncation_rejected"],
        ),
        e("qdyn", "fixed-step halving converges to 1e-9", &["qdyn.step_halving"]),
        e("gate", "phase-space loops close: motional entropy below 1e-8", &["gate.loop_closure"]),
        e("gate", "ion label exchange leaves the outcome unchanged", &["gate.swap_symmetry"]),
        e("gate", "closed-form and master-equation populations agree to 1e-6", &["gate.analytic_numeric"]),
        e("gate", "Bell error quadratic in the Rabi offset with (pi^2/4) curvature", &["gate.curvature"]),
        e(
            "gate",
            "calibrated noise-free sequence reaches the Bell state",
            &["gate.calibrated_fidelity", "gate.balanced_populations"],
        ),
        e(
            "budget",
            "closed forms match Lindblad oracles within 10%",
            &[
                "budget.oracle_heating",
                "budget.oracle_dephasing",
                "budget.oracle_raman",
                "budget.oracle_rayleigh",
                "budget.oracle_thermal",
            ],
        ),
        e("budget", "errors non-negative and non-decreasing in their rates", &["budget.monotone"]),
        e(
            "budget",
            "alpha_K reproduced within 2% and decreasing in K",
            &["budget.alpha_k1", "budget.alpha_k2", "budget.alpha_k4", "budget.alpha_monotone"],
        ),
        e(
            "budget",
            "total equals component sum; 100 us model below 1.8e-3",
            &["budget.total_sum", "budget.model_100us", "budget.table1_total"],
        ),
        e("budget", "crosstalk and multi-gate scaling", &["budget.crosstalk", "budget.multigate_quadratic"]),
        e("spinecho", "invariant under qubit-frequency sign flip", &["spinecho.swap_symmetry"]),
        e("spinecho", "vanishes monotonically for fast pulses", &["spinecho.fast_pulses"]),
        e("spinecho", "ideal pulses give the Bell state to 1e-12", &["spinecho.ideal"]),
        e(
            "spinecho",
            "100 us value and first maximum",
            &["spinecho.value_100us", "spinecho.first_max", "spinecho.first_max_time"],
        ),
        e("tomography", "ML contrast bias shrinks with shots", &["tomography.bias_shrinks"]),
        e("tomography", "phi0 canonical in [0, pi) with C >= 0", &["tomography.phi0_canonical"]),
        e("tomography", "fitted probabilities within [0, 1]", &["tomography.probability_bounds"]),
        e("tomography", "ML log-likelihood at least the LS value", &["tomography.ml_ge_ls"]),
        e(
            "tomography",
            "noise-free recovery and fidelity composition",
            &["tomography.noiseless", "tomography.composition"],
        ),
        e("readout", "SPAM map column-stochastic and exactly inverted", &["readout.stochastic", "readout.inverse"]),
        e("readout", "classification error decreasing in detection time", &["readout.detect_monotone"]),
        e("readout", "SPAM estimate unbiased over replicas", &["readout.unbiased"]),
        e(
            "readout",
            "shelf decay, inflation and bias",
            &["readout.decay_probability", "readout.inflation", "readout.shelf_bias"],
        ),
        e("rbm", "depolarizing residuals show no length trend", &["rbm.white_residuals"]),
        e("rbm", "fitted error invariant under a global phase", &["rbm.phase_invariance"]),
        e("rbm", "survival matches 1/2 + 1/2(1-2e)^l", &["rbm.analytic_survival", "rbm.monte_carlo_survival"]),
        e("rbm", "injected error recovered", &["rbm.recovery"]),
        e("config", "round trip lossless for all profiles", &["config.roundtrip"]),
        e("config", "every numeric default carries provenance", &["config.provenance"]),
        e("config", "strict keys and field-naming diagnostics", &["config.strict", "config.field_diagnostic"]),
        e("cli", "identical inputs give byte-identical outputs", &["cli.determinism"]),
        e("cli", "validate covers every invariant", &["cli.coverage"]),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub seed: u64,
    pub checks: Vec<CheckResult>,
    pub coverage: Vec<CoverageEntry>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> Vec<&CheckResult> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

/// Run the full suite. Stochastic checks draw from streams derived from `seed`.
pub fn run_validation(seed: u64) -> Result<ValidationReport> {
    let mut checks = Vec::new();
    checks.extend(qdyn_checks()?);
    checks.extend(gate_checks()?);
    checks.extend(budget_checks()?);
    checks.extend(spinecho_checks()?);
    checks.extend(tomography_checks(seed)?);
    checks.extend(readout_checks(seed)?);
    checks.extend(rbm_checks(seed)?);
    checks.extend(config_checks()?);
    checks.push(determinism_check(seed)?);
    let cov = coverage();
    checks.push(coverage_check(&cov, &checks));
    Ok(ValidationReport { seed, checks, coverage: cov })
}

fn coverage_check(cov: &[CoverageEntry], checks: &[CheckResult]) -> CheckResult {
    let uncovered = cov
        .iter()
        .filter(|e| {
            e.checks.is_empty()
                || e.checks.iter().any(|id| *id != "cli.coverage" && !checks.iter().any(|c| c.id == *id))
        })
        .count();
    CheckResult::new("cli.coverage", "invariants without an executed check", Rule::AtMost, uncovered as f64, 0.0, 0.0)
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Spin-dependent displacement of the gate mode with heating and dephasing.
fn driven_gate_space(cutoff: usize, g: f64) -> Result<(HilbertSpec, Hamiltonian, QuantumState)> {
    let spec = HilbertSpec::gate(cutoff)?;
    let ops = build_operators(&spec)?;
    let coupling = ops.sz[0].sub(&ops.sz[1]).matmul(&ops.a[0]);
    let delta = 2.0 * PI * 2e4;
    let h = Hamiltonian::zero(spec.dim())
        .with_term(coupling.clone(), Arc::new(move |t| C64::from_polar(g, -delta * t)))
        .with_term(coupling.adjoint(), Arc::new(move |t| C64::from_polar(g, delta * t)));
    let plus = DVector::from_element(4, c(0.5));
    let s0 = QuantumState::product(spec.clone(), &(&plus * plus.adjoint()), &[fock_mode(cutoff, 0)])?;
    Ok((spec, h, s0))
}

fn qdyn_checks() -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    let (spec, h, s0) = driven_gate_space(20, 3e4)?;
    let ops = build_operators(&spec)?;
    let noise = NoiseParams {
        heating_rate: 500.0,
        motional_tau: 2e-3,
        raman_rate: 50.0,
        rayleigh_deph_rate: 50.0,
        ..NoiseParams::zero()
    };
    let channels = noise.channels(&ops)?;
    let times: Vec<f64> = (1..=20).map(|k| k as f64 * 5e-6).collect();
    let traj = evolve(&s0, &h, &channels, &times, &IntegratorConfig::default())?;
    let tr = traj.iter().map(|s| (s.trace() - c(1.0)).norm()).fold(0.0, f64::max);
    let herm = traj.iter().map(|s| s.hermiticity_defect()).fold(0.0, f64::max);
    out.push(CheckResult::new(
        "qdyn.trace",
        "max |tr rho - 1| on a noisy gate trajectory",
        Rule::AtMost,
        tr,
        1e-9,
        0.0,
    ));
    out.push(CheckResult::new(
        "qdyn.hermiticity",
        "max hermiticity defect on the same trajectory",
        Rule::AtMost,
        herm,
        1e-10,
        0.0,
    ));
    let md = spec.mode_dim();
    let top = traj
        .iter()
        .map(|s| (0..4).map(|b| s.population(b * md + md - 1) + s.population(b * md + md - 2)).sum::<f64>())
        .fold(0.0, f64::max);
    out.push(CheckResult::new(
        "qdyn.truncation_accepted",
        "top-two Fock population in an accepted run",
        Rule::AtMost,
        top,
        1e-8,
        0.0,
    ));

    let pure = evolve(&s0, &h, &[], &times, &IntegratorConfig::default())?;
    let dp = pure.iter().map(|s| (purity(s) - 1.0).abs()).fold(0.0, f64::max);
    out.push(CheckResult::new(
        "qdyn.unitary_purity",
        "max |tr rho^2 - 1| without channels",
        Rule::AtMost,
        dp,
        1e-8,
        0.0,
    ));

    let (_, h_small, s_small) = driven_gate_space(4, 3e5)?;
    let rejected =
        matches!(evolve(&s_small, &h_small, &[], &[1e-4], &IntegratorConfig::default()), Err(Error::Truncation { .. }));
    out.push(CheckResult::flag("qdyn.truncation_rejected", "undersized Fock space is rejected", rejected));

    let (_, h12, s12) = driven_gate_space(12, 2.2e4)?;
    let reference = evolve(&s12, &h12, &[], &[5e-5], &IntegratorConfig::adaptive(1e-12, 1e-14))?.remove(0);
    let run = |dt: f64| evolve(&s12, &h12, &[], &[5e-5], &IntegratorConfig::fixed(dt)).map(|mut v| v.remove(0));
    let d1 = max_abs_diff(&run(2e-7)?.rho, &reference.rho);
    let d2 = max_abs_diff(&run(1e-7)?.rho, &reference.rho);
    out.push(CheckResult::new(
        "qdyn.step_halving",
        "halved fixed step deviation from the reference",
        Rule::AtMost,
        if d2 < d1 { d2 } else { f64::INFINITY },
        1e-9,
        0.0,
    ));
    Ok(out)
}

fn table1_gate(opts: &SequenceOptions) -> Result<GateConfig> {
    calibrated(&GateConfig::new(100e-6, 2), opts)
}

fn gate_checks() -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    let opts = SequenceOptions::default();
    let cfg = table1_gate(&opts)?;
    let zero = NoiseParams::zero();
    let base = run_bell_sequence(&cfg, &zero, &opts)?;
    out.push(CheckResult::new(
        "gate.calibrated_fidelity",
        "noise-free calibrated Bell fidelity",
        Rule::AtLeast,
        base.bell_fidelity,
        1.0 - 1e-9,
        0.0,
    ));
    let imbalance = (base.populations.down_down - 0.5).abs().max((base.populations.up_up - 0.5).abs());
    out.push(CheckResult::new(
        "gate.balanced_populations",
        "max |P - 1/2| for the even populations",
        Rule::AtMost,
        imbalance,
        1e-8,
        0.0,
    ));
    // Spin state purity equals motional purity for a pure global state.
    out.push(CheckResult::new(
        "gate.loop_closure",
        "spin-motion entanglement entropy after closed loops",
        Rule::AtMost,
        von_neumann_entropy(&base.final_spin_state),
        1e-8,
        0.0,
    ));
    let swapped = run_bell_sequence(&cfg, &zero, &SequenceOptions { swap_ions: true, ..opts.clone() })?;
    let d = max_abs_diff(&base.final_spin_state.rho, &swapped.final_spin_state.rho)
        .max((base.bell_fidelity - swapped.bell_fidelity).abs())
        .max((base.geometric_phase_differential - swapped.geometric_phase_differential).abs());
    out.push(CheckResult::new(
        "gate.swap_symmetry",
        "max outcome change under ion exchange",
        Rule::AtMost,
        d,
        1e-10,
        0.0,
    ));

    let grid = t_r_grid(cfg.t_g, 50);
    let numeric = population_dynamics(&cfg, &zero, &grid, &opts)?;
    let analytic = population_dynamics_analytic(&cfg, &grid, &opts)?;
    let dev = numeric
        .iter()
        .zip(&analytic)
        .map(|(a, b)| (a.down_down - b.down_down).abs().max((a.flip - b.flip).abs()).max((a.up_up - b.up_up).abs()))
        .fold(0.0, f64::max);
    out.push(CheckResult::new(
        "gate.analytic_numeric",
        "max population deviation on a 50-point t_R grid",
        Rule::AtMost,
        dev,
        1e-6,
        0.0,
    ));

    let frac = 5e-3;
    let up = noise_free_error(&cfg, cfg.rabi * (1.0 + frac), cfg.detuning_trim, &opts)?;
    let down = noise_free_error(&cfg, cfg.rabi * (1.0 - frac), cfg.detuning_trim, &opts)?;
    out.push(CheckResult::new(
        "gate.curvature",
        "Bell error at a 0.5% Rabi offset vs (pi^2/4)(dW/W)^2",
        Rule::Relative,
        0.5 * (up + down),
        PI * PI / 4.0 * frac * frac,
        0.10,
    ));
    Ok(out)
}

fn budget_checks() -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    let opts = SequenceOptions::default();
    let cfg = table1_gate(&opts)?;
    let alphas = AlphaTable::default();
    let f = raman_coherence_factor(&cfg)?;
    let oracles = [
        ("budget.oracle_heating", heating_oracle(&cfg, 2.2, &opts)?),
        ("budget.oracle_dephasing", dephasing_oracle(&cfg, 0.2, &alphas, &opts)?),
        ("budget.oracle_raman", raman_oracle(&cfg, 0.4e-3 * 0.75 / (2.0 * cfg.t_g * f), &opts)?),
        ("budget.oracle_rayleigh", rayleigh_oracle(&cfg, 0.1e-3 / cfg.t_g, &opts)?),
    ];
    for (id, o) in oracles {
        out.push(CheckResult::new(
            id,
            &format!("{} oracle vs closed form", o.label),
            Rule::Relative,
            o.numeric,
            o.analytic,
            0.10,
        ));
    }
    let th = spectator_thermal_error(&cfg, 0.2, &opts)?;
    out.push(CheckResult::new(
        "budget.oracle_thermal",
        "spectator thermal error at nbar = 0.2",
        Rule::Relative,
        th.numeric,
        th.analytic,
        0.10,
    ));

    let rates: Vec<f64> = (0..=8).map(|k| if k == 0 { 0.0 } else { 10f64.powi(k - 4) }).collect();
    let curves: Vec<Vec<f64>> = vec![
        rates.iter().map(|&r| heating_error(r, 100e-6, 2)).collect(),
        rates
            .iter()
            .map(|&r| dephasing_error(if r == 0.0 { f64::INFINITY } else { 1.0 / r }, 100e-6, 2, &alphas))
            .collect::<Result<_>>()?,
        rates.iter().map(|&r| raman_error(r, 100e-6, f)).collect(),
        rates.iter().map(|&r| rayleigh_error(r, 100e-6)).collect(),
        rates.iter().map(|&r| spin_dephasing_error(r, 100e-6)).collect(),
        rates.iter().map(|&r| thermal_error(0.1, r.min(10.0))).collect(),
        rates.iter().map(|&r| intensity_drift_error(r.min(1e4) * 4e-6)).collect::<Result<_>>()?,
        rates.iter().map(|&r| crosstalk_error(r, 1e5)).collect::<Result<_>>()?,
    ];
    let violations = curves
        .iter()
        .map(|v| v.iter().filter(|&&x| !(x >= 0.0)).count() + v.windows(2).filter(|w| w[1] < w[0]).count())
        .sum::<usize>();
    out.push(CheckResult::new(
        "budget.monotone",
        "negative or decreasing formula values",
        Rule::AtMost,
        violations as f64,
        0.0,
        0.0,
    ));

    let mut fitted = Vec::new();
    for (k, id) in [(1u32, "budget.alpha_k1"), (2, "budget.alpha_k2"), (4, "budget.alpha_k4")] {
        let a = alpha_numeric(k, 100e-6, &ALPHA_SAMPLES, &opts)?.alpha;
        let expect = alphas.get(k).unwrap_or(f64::NAN);
        out.push(CheckResult::new(
            id,
            &format!("alpha_{k} from master-equation slope"),
            Rule::Relative,
            a,
            expect,
            0.02,
        ));
        fitted.push(a);
    }
    let decreasing = fitted.windows(2).all(|w| w[1] < w[0]);
    out.push(CheckResult::flag("budget.alpha_monotone", "fitted alpha_K decreasing in K", decreasing));

    let profile = builtin_profile("table1-100us")?;
    let b = budget_table(&profile.noise, &profile.gate, &profile.alphas)?;
    let sum: f64 = b.entries.iter().map(|(_, v)| v).sum();
    out.push(CheckResult::new(
        "budget.total_sum",
        "budget total minus component sum",
        Rule::Absolute,
        b.total - sum,
        0.0,
        0.0,
    ));
    out.push(CheckResult::new(
        "budget.table1_total",
        "table1-100us budget total",
        Rule::Absolute,
        b.total,
        0.9e-3,
        0.1e-3,
    ));
    let curve = model_curves(&profile.noise, &profile.gate, &profile.scattering_model(), &profile.alphas, &[100e-6])?;
    out.push(CheckResult::new(
        "budget.model_100us",
        "model total at 100 us vs measured +1 sigma",
        Rule::AtMost,
        curve[0].budget.total,
        1.8e-3,
        0.0,
    ));
    out.push(CheckResult::new(
        "budget.crosstalk",
        "crosstalk error at (0.2, 36.5) kHz",
        Rule::Absolute,
        crosstalk_error(0.2e3, 36.5e3)?,
        7.4e-5,
        0.05e-5,
    ));
    let mg = multi_gate_study(21, 1.5e-3, 0.005)?;
    out.push(CheckResult::new(
        "budget.multigate_quadratic",
        "fitted N^2 coefficient vs drift prediction",
        Rule::Relative,
        mg.fit.quadratic,
        mg.predicted_quadratic,
        0.25,
    ));
    Ok(out)
}

fn spinecho_checks() -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    let cfg = SpinEchoConfig::default();
    let mut asym: f64 = 0.0;
    for t in [20e-6, 100e-6, 204e-6, 350e-6] {
        asym = asym.max((epsilon_se(&cfg, t)? - epsilon_se(&cfg.swapped(), t)?).abs());
    }
    out.push(CheckResult::new("spinecho.swap_symmetry", "max |eps(df) - eps(-df)|", Rule::AtMost, asym, 1e-14, 0.0));

    let errs: Vec<f64> = [1.0, 10.0, 100.0, 1000.0, 10000.0]
        .iter()
        .map(|&s| epsilon_se(&SpinEchoConfig { rabi_mw: cfg.rabi_mw * s, ..cfg.clone() }, 100e-6))
        .collect::<Result<_>>()?;
    let monotone = errs.windows(2).all(|w| w[1] < w[0]);
    let last = *errs.last().unwrap_or(&f64::NAN);
    out.push(CheckResult::new(
        "spinecho.fast_pulses",
        "eps at 1e4 x Rabi frequency (monotone decrease required)",
        Rule::AtMost,
        if monotone { last } else { f64::INFINITY },
        1e-9,
        0.0,
    ));
    let ideal = epsilon_se(&SpinEchoConfig { delta_f: 0.0, ..cfg.clone() }, 100e-6)?;
    out.push(CheckResult::new("spinecho.ideal", "Bell error with ideal pulses", Rule::AtMost, ideal.abs(), 1e-12, 0.0));
    out.push(CheckResult::new(
        "spinecho.value_100us",
        "eps_SE at 100 us",
        Rule::Relative,
        epsilon_se(&cfg, 100e-6)?,
        1.4e-3,
        0.15,
    ));
    let (t_max, e_max) = first_maximum(&cfg, 150e-6, 260e-6, 45)?;
    out.push(CheckResult::new("spinecho.first_max", "first maximum of eps_SE", Rule::Relative, e_max, 1.8e-3, 0.10));
    out.push(CheckResult::new(
        "spinecho.first_max_time",
        "time of the first maximum vs 1/df",
        Rule::Relative,
        t_max,
        1.0 / cfg.delta_f,
        0.10,
    ));
    Ok(out)
}

fn tomography_checks(seed: u64) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    let mut shrink_ok = true;
    let mut last_bias = f64::NAN;
    for (i, shots) in [100u64, 1000, 10000].into_iter().enumerate() {
        let s = bias_study(&FringeParams::uniform(0.995, shots), 200, seed.wrapping_add(i as u64))?;
        let (m, e) = (s.ml_bias.mean.abs(), s.ml_bias.std_err);
        if let Some((pm, _)) = prev {
            shrink_ok &= m <= pm + 2.0 * e;
        }
        prev = Some((m, e));
        last_bias = m;
    }
    out.push(CheckResult::new(
        "tomography.bias_shrinks",
        "|ML bias| at 1e4 shots (non-increasing over 1e2, 1e3, 1e4 required)",
        Rule::AtMost,
        if shrink_ok { last_bias } else { f64::INFINITY },
        1e-3,
        0.0,
    ));

    let phases = uniform_phases(16);
    let mut canon_bad = 0usize;
    for (k, phi0) in [0.3, 2.5, 4.0, -1.2, 7.0].into_iter().enumerate() {
        let d = synthesize_parity_seeded(0.8, 0.05, phi0, &phases, 2000, seed.wrapping_add(100 + k as u64))?;
        let fit = fit_ml_binomial(&d)?;
        let wrapped = phi0.rem_euclid(PI);
        let dist = (fit.phi0 - wrapped).abs().min(PI - (fit.phi0 - wrapped).abs());
        if !(fit.c >= 0.0 && (0.0..PI).contains(&fit.phi0) && dist < 0.05) {
            canon_bad += 1;
        }
    }
    out.push(CheckResult::new(
        "tomography.phi0_canonical",
        "fits outside C >= 0, phi0 in [0, pi)",
        Rule::AtMost,
        canon_bad as f64,
        0.0,
        0.0,
    ));

    let n = phases.len();
    let extremes = [
        ParityDataset::new(phases.clone(), vec![500; n], vec![500; n])?,
        ParityDataset::new(phases.clone(), vec![0; n], vec![500; n])?,
        synthesize_parity_seeded(1.0, 0.0, 0.2, &phases, 500, seed.wrapping_add(200))?,
        synthesize_parity_seeded(0.6, 0.4, 1.0, &phases, 50, seed.wrapping_add(201))?,
    ];
    let mut worst: f64 = 0.0;
    for d in &extremes {
        let fit = fit_ml_binomial(d)?;
        worst = worst.max(fit.c0.abs() + fit.c.abs() - 1.0);
        for &p in &d.phases {
            let q = fit.probability(p);
            worst = worst.max(-q).max(q - 1.0);
        }
    }
    out.push(CheckResult::new(
        "tomography.probability_bounds",
        "largest excursion of |C0|+|C| or p outside bounds",
        Rule::AtMost,
        worst,
        1e-11,
        0.0,
    ));

    let mut deficit: f64 = f64::NEG_INFINITY;
    for k in 0..40u64 {
        let cval = 0.5 + 0.0125 * k as f64;
        let d = synthesize_parity_seeded(cval, 0.01, 0.7, &phases, 200, seed.wrapping_add(300 + k))?;
        let ml = fit_ml_binomial(&d)?;
        let ls = fit_least_squares(&d)?;
        deficit = deficit.max((ls.log_likelihood - ml.log_likelihood) / (1.0 + ml.log_likelihood.abs()));
    }
    out.push(CheckResult::new(
        "tomography.ml_ge_ls",
        "max relative (logL_LS - logL_ML)",
        Rule::AtMost,
        deficit,
        1e-12,
        0.0,
    ));

    let total = vec![1u64 << 40; n];
    let even: Vec<u64> = phases
        .iter()
        .map(|&p| (crate::tomography::model_probability(0.9, 0.03, 0.4, p) * (1u64 << 40) as f64).round() as u64)
        .collect();
    let fit = fit_ml_binomial(&ParityDataset::new(phases.clone(), even, total)?)?;
    let dev = (fit.c - 0.9).abs().max((fit.c0 - 0.03).abs()).max((fit.phi0 - 0.4).abs());
    out.push(CheckResult::new(
        "tomography.noiseless",
        "parameter error on a noise-free fringe",
        Rule::AtMost,
        dev,
        1e-8,
        0.0,
    ));

    let f = bell_fidelity(
        Measured::exact(0.9953),
        Measured::exact(0.9997),
        Corrections { spam: None, se: Some(Measured::exact(1.4e-3)) },
    );
    out.push(CheckResult::new(
        "tomography.composition",
        "F from C = 0.9953, Psum = 0.9997",
        Rule::Absolute,
        f.fidelity,
        0.9975,
        1e-12,
    ));
    Ok(out)
}

fn readout_checks(seed: u64) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    let m = ReadoutModel::default();
    let map = build_spam_map(2.5e-3, 1.0e-3)?;
    let col = (0..3).map(|j| ((0..3).map(|i| map.matrix[i][j]).sum::<f64>() - 1.0).abs()).fold(0.0, f64::max);
    out.push(CheckResult::new(
        "readout.stochastic",
        "max |column sum - 1| of the SPAM map",
        Rule::AtMost,
        col,
        1e-15,
        0.0,
    ));
    let truth = [0.49, 0.02, 0.49];
    let back = correct_populations(map.apply(truth), &map)?;
    let inv = (0..3).map(|i| (back[i] - truth[i]).abs()).fold(0.0, f64::max);
    out.push(CheckResult::new("readout.inverse", "max error of correct(apply(p))", Rule::AtMost, inv, 1e-12, 0.0));

    let mut errs = Vec::new();
    for t in [0.3, 0.5, 0.8, 1.2, 1.9, 3.0] {
        let ideal = ReadoutModel::ideal(m.bright_rate, m.dark_rate, t)?;
        let (d, u) = spam_exact(&ideal);
        errs.push(d + u);
    }
    let monotone = errs.windows(2).all(|w| w[1] < w[0]);
    out.push(CheckResult::flag(
        "readout.detect_monotone",
        "classification error decreasing in detection time",
        monotone,
    ));

    let (d, u) = spam_exact(&m);
    let truth_spam = 0.5 * (d + u);
    let reps = 100u64;
    let est: Vec<f64> = (0..reps)
        .map(|i| estimate_spam(&m, 20_000, seed.wrapping_mul(1_000_003).wrapping_add(i)).map(|e| e.eps_spam))
        .collect::<Result<_>>()?;
    let mean = est.iter().sum::<f64>() / reps as f64;
    let sd = (est.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (reps - 1) as f64).sqrt();
    out.push(CheckResult::new(
        "readout.unbiased",
        "replica mean of eps_SPAM vs model (2 sigma of the mean)",
        Rule::Absolute,
        mean,
        truth_spam,
        2.0 * sd / (reps as f64).sqrt(),
    ));
    out.push(CheckResult::new(
        "readout.decay_probability",
        "shelf decay probability",
        Rule::Absolute,
        m.decay_probability(),
        1.625e-3,
        0.5e-6,
    ));
    let emu = GateRunEmulation::default();
    out.push(CheckResult::new(
        "readout.inflation",
        "uncorrected infidelity inflation / eps_SPAM",
        Rule::Relative,
        uncorrected_inflation(&m, &emu)? / truth_spam,
        3.0,
        0.20,
    ));
    let bias = shelf_decay_bias(&m, &emu)?;
    out.push(CheckResult::new(
        "readout.shelf_bias",
        "inferred infidelity bias from shelf decay",
        Rule::Absolute,
        bias.bias,
        0.1e-3,
        0.05e-3,
    ));
    Ok(out)
}

fn rbm_checks(seed: u64) -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    let eps = 2e-4;
    let noise = NoiseModel1Q::depolarizing(eps);
    let plan = RbPlan { seed, ..RbPlan::default() };

    let exact = exact_survival(&plan, &noise)?;
    let per_seq = plan.n_sequences as usize;
    let mut worst: f64 = 0.0;
    for (i, &l) in plan.sequence_lengths.iter().enumerate() {
        for s in &exact[i * per_seq..(i + 1) * per_seq] {
            worst = worst.max((s - depolarizing_survival(eps, l)).abs());
        }
    }
    out.push(CheckResult::new(
        "rbm.analytic_survival",
        "max |exact survival - 1/2 - 1/2(1-2e)^l|",
        Rule::AtMost,
        worst,
        1e-9,
        0.0,
    ));

    let fit = fit_decay(&simulate_rb(&plan, &noise)?)?;
    let mut z: f64 = 0.0;
    for (i, &l) in fit.lengths.iter().enumerate() {
        z = z.max((fit.survival[i] - depolarizing_survival(eps, l)).abs() / fit.survival_err[i].max(1e-12));
    }
    out.push(CheckResult::new(
        "rbm.monte_carlo_survival",
        "max |z| of per-length survival vs analytic",
        Rule::AtMost,
        z,
        3.0,
        0.0,
    ));
    out.push(CheckResult::new(
        "rbm.recovery",
        "recovered error per gate for injected 2e-4",
        Rule::Relative,
        fit.error_per_gate,
        eps,
        0.20,
    ));

    let shifted = fit_decay(&simulate_rb(&RbPlan { phase_offset: 0.7, ..plan.clone() }, &noise)?)?;
    let se = (fit.error_per_gate_err.powi(2) + shifted.error_per_gate_err.powi(2)).sqrt();
    out.push(CheckResult::new(
        "rbm.phase_invariance",
        "fitted error with a global phase offset",
        Rule::Absolute,
        shifted.error_per_gate,
        fit.error_per_gate,
        2.0 * se,
    ));

    // Pooled normalized residuals regressed on standardized length.
    let (mut sxy, mut sxx, mut n) = (0.0, 0.0, 0.0);
    let m = 20u64;
    for k in 0..m {
        let p = RbPlan { seed: seed.wrapping_add(1000 + k), ..RbPlan::default() };
        let f = fit_decay(&simulate_rb(&p, &noise)?)?;
        let mean_l = f.lengths.iter().map(|&l| l as f64).sum::<f64>() / f.lengths.len() as f64;
        let sd_l =
            (f.lengths.iter().map(|&l| (l as f64 - mean_l).powi(2)).sum::<f64>() / f.lengths.len() as f64).sqrt();
        for (i, &l) in f.lengths.iter().enumerate() {
            let r = (f.survival[i] - (f.a * f.p.powi(l as i32) + f.b)) / f.survival_err[i];
            let x = (l as f64 - mean_l) / sd_l;
            sxy += x * r;
            sxx += x * x;
            n += 1.0;
        }
    }
    let slope_z = (sxy / sxx) / (1.0 / sxx.sqrt());
    let _ = n;
    out.push(CheckResult::new(
        "rbm.white_residuals",
        "|z| of residual trend against length",
        Rule::AtMost,
        slope_z.abs(),
        2.0,
        0.0,
    ));
    Ok(out)
}

fn config_checks() -> Result<Vec<CheckResult>> {
    let mut out = Vec::new();
    let profiles = builtin_profiles()?;
    let mut lossy = 0usize;
    let mut missing = 0usize;
    for p in &profiles {
        if ExperimentConfig::from_toml(&p.to_toml()?)? != *p {
            lossy += 1;
        }
        missing += p.missing_provenance().len();
    }
    out.push(CheckResult::new(
        "config.roundtrip",
        "profiles changed by a TOML round trip",
        Rule::AtMost,
        lossy as f64,
        0.0,
        0.0,
    ));
    out.push(CheckResult::new(
        "config.provenance",
        "numeric defaults without provenance",
        Rule::AtMost,
        missing as f64,
        0.0,
        0.0,
    ));
    let text = format!("{}\nunexpected_key = 1\n", profiles[0].to_toml()?);
    out.push(CheckResult::flag(
        "config.strict",
        "unknown keys are rejected",
        ExperimentConfig::from_toml(&text).is_err(),
    ));
    let mut bad = profiles[0].clone();
    bad.noise.heating_rate = -1.0;
    let named = bad.validate().iter().any(|m| m.contains("noise.heating_rate"));
    out.push(CheckResult::flag("config.field_diagnostic", "negative heating rate names noise.heating_rate", named));
    Ok(out)
}

fn determinism_check(seed: u64) -> Result<CheckResult> {
    let render = || -> Result<String> {
        let b = bias_study(&FringeParams::uniform(0.995, 1000), 20, seed)?;
        let plan = RbPlan { seed, n_sequences: 4, ..RbPlan::default() };
        let r = simulate_rb(&plan, &NoiseModel1Q::depolarizing(1e-4))?;
        let s = estimate_spam(&ReadoutModel::default(), 5000, seed)?;
        Ok(serde_json::to_string(&(b, r, s))?)
    };
    Ok(CheckResult::flag(
        "cli.determinism",
        "repeated stochastic studies serialize identically",
        render()? == render()?,
    ))
}
