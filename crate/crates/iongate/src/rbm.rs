// Copyright 2026 IonGate Contributors
// SPDX-License-Identifier: Apache-2.0

//! Single-qubit randomized benchmarking: Pauli-randomised π/2 sequences with
//! Clifford-tracked recovery, noisy simulation and exponential-decay fits.

use std::f64::consts::FRAC_PI_2;
use std::path::Path;

use nalgebra::{DMatrix, Matrix2, Vector2};
use rand::Rng;
use rand_distr::{Binomial, Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::levenberg_marquardt;
use crate::qdyn::C64;
use crate::spinecho::{mw_pulse, rotation};
use crate::tomography::dataset_rng;

const SIM_STREAM_OFFSET: u64 = 1 << 40;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RbPlan {
    pub sequence_lengths: Vec<u32>,
    pub n_sequences: u32,
    pub shots: u32,
    /// Duration of one physical π/2 pulse, s.
    pub pulse_duration: f64,
    /// Allow an idle slot in place of the π/2 Clifford of a computational gate.
    #[serde(default)]
    pub include_identity: bool,
    /// Common offset added to every pulse phase, rad.
    #[serde(default)]
    pub phase_offset: f64,
    pub seed: u64,
}

impl Default for RbPlan {
    fn default() -> Self {
        Self {
            sequence_lengths: vec![1, 100, 300, 600, 1000],
            n_sequences: 32,
            shots: 300,
            pulse_duration: 7.5e-6,
            include_identity: false,
            phase_offset: 0.0,
            seed: 0,
        }
    }
}

impl RbPlan {
    pub fn validate(&self, prefix: &str) -> Vec<String> {
        let mut v = Vec::new();
        if self.sequence_lengths.is_empty() {
            v.push(format!("{prefix}sequence_lengths must not be empty"));
        }
        if self.sequence_lengths.contains(&0) {
            v.push(format!("{prefix}sequence_lengths must all be >= 1"));
        }
        if self.sequence_lengths.windows(2).any(|w| w[0] >= w[1]) {
            v.push(format!("{prefix}sequence_lengths must be strictly increasing"));
        }
        if self.n_sequences == 0 {
            v.push(format!("{prefix}n_sequences must be >= 1"));
        }
        if self.shots == 0 {
            v.push(format!("{prefix}shots must be >= 1"));
        }
        if !(self.pulse_duration > 0.0 && self.pulse_duration.is_finite()) {
            v.push(format!("{prefix}pulse_duration must be > 0 (got {})", self.pulse_duration));
        }
        if !self.phase_offset.is_finite() {
            v.push(format!("{prefix}phase_offset must be finite"));
        }
        v
    }

    pub fn check(&self) -> Result<()> {
        let v = self.validate("rb.");
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(v))
        }
    }
}

/// Ornstein-Uhlenbeck drive-phase noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseNoise {
    /// Stationary rms phase, rad.
    pub amplitude: f64,
    /// Correlation time, s.
    pub correlation_time: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseModel1Q {
    /// Error per computational gate of an appended depolarizing channel.
    #[serde(default)]
    pub depolarizing_per_gate: f64,
    #[serde(default)]
    pub phase_noise: Option<PhaseNoise>,
    /// Static drive detuning, Hz.
    #[serde(default)]
    pub detuning_error: f64,
    /// Fractional pulse-area error.
    #[serde(default)]
    pub amplitude_error_frac: f64,
    /// Probability that the final measurement reports the wrong outcome.
    #[serde(default)]
    pub measurement_error: f64,
}

impl NoiseModel1Q {
    pub fn depolarizing(eps: f64) -> Self {
        Self { depolarizing_per_gate: eps, ..Self::default() }
    }

    pub fn validate(&self, prefix: &str) -> Vec<String> {
        let mut v = Vec::new();
        for (name, x) in
            [("depolarizing_per_gate", self.depolarizing_per_gate), ("measurement_error", self.measurement_error)]
        {
            if !(0.0..=0.5).contains(&x) {
                v.push(format!("{prefix}{name} must lie in [0, 0.5] (got {x})"));
            }
        }
        if !self.detuning_error.is_finite() || !self.amplitude_error_frac.is_finite() {
            v.push(format!("{prefix}detuning_error and amplitude_error_frac must be finite"));
        }
        if let Some(p) = self.phase_noise {
            if !(p.amplitude >= 0.0 && p.correlation_time > 0.0) {
                v.push(format!("{prefix}phase_noise needs amplitude >= 0 and correlation_time > 0"));
            }
        }
        v
    }
}

/// Sequence element.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Op {
    /// Physical π/2 pulse at the given phase.
    HalfPi(f64),
    /// Pauli Z applied as a frame change.
    PauliZ,
    /// End of one computational gate.
    GateEnd,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RbSequence {
    pub length: u32,
    pub ops: Vec<Op>,
    /// Phase of the final recovery π/2 pulse, if one is needed.
    pub recovery: Option<f64>,
    /// Noise-free outcome, 0 for the initial state.
    pub expected: usize,
    /// Physical pulses in the computational gates (recovery excluded).
    pub physical_pulses: usize,
}

fn pauli_z() -> Matrix2<C64> {
    Matrix2::new(C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(-1.0, 0.0))
}

fn ket0() -> Vector2<C64> {
    Vector2::new(C64::new(1.0, 0.0), C64::new(0.0, 0.0))
}

/// Random sequence of `length` computational gates followed by a recovery pulse.
pub fn generate_sequence<R: Rng + ?Sized>(
    length: u32,
    include_identity: bool,
    phase_offset: f64,
    rng: &mut R,
) -> RbSequence {
    let mut ops = Vec::new();
    let mut pulses = 0;
    let mut state = ket0();
    let push = |op: Op, ops: &mut Vec<Op>, state: &mut Vector2<C64>| {
        match op {
            Op::HalfPi(ph) => *state = rotation(FRAC_PI_2, ph) * *state,
            Op::PauliZ => *state = pauli_z() * *state,
            Op::GateEnd => {}
        }
        ops.push(op);
    };
    for _ in 0..length {
        match rng.gen_range(0..4u8) {
            1 => {
                push(Op::HalfPi(phase_offset), &mut ops, &mut state);
                push(Op::HalfPi(phase_offset), &mut ops, &mut state);
                pulses += 2;
            }
            2 => {
                push(Op::HalfPi(phase_offset + FRAC_PI_2), &mut ops, &mut state);
                push(Op::HalfPi(phase_offset + FRAC_PI_2), &mut ops, &mut state);
                pulses += 2;
            }
            3 => push(Op::PauliZ, &mut ops, &mut state),
            _ => {}
        }
        let slots = if include_identity { 5 } else { 4 };
        let k = rng.gen_range(0..slots);
        if k < 4 {
            push(Op::HalfPi(phase_offset + k as f64 * FRAC_PI_2), &mut ops, &mut state);
            pulses += 1;
        }
        ops.push(Op::GateEnd);
    }
    let p0 = state[0].norm_sqr();
    let (recovery, expected) = if p0 > 0.75 {
        (None, 0)
    } else if p0 < 0.25 {
        (None, 1)
    } else {
        let phase = (0..4)
            .map(|k| phase_offset + k as f64 * FRAC_PI_2)
            .find(|&ph| (rotation(FRAC_PI_2, ph) * state)[0].norm_sqr() > 0.75)
            .unwrap_or(phase_offset);
        (Some(phase), 0)
    };
    RbSequence { length, ops, recovery, expected, physical_pulses: pulses }
}

/// All sequences of a plan, ordered by length index then sequence id.
pub fn generate_sequences(plan: &RbPlan) -> Result<Vec<RbSequence>> {
    plan.check()?;
    let n = plan.n_sequences as u64;
    Ok(plan
        .sequence_lengths
        .par_iter()
        .enumerate()
        .flat_map_iter(|(li, &l)| {
            (0..n).map(move |s| {
                let mut rng = dataset_rng(plan.seed, li as u64 * n + s);
                generate_sequence(l, plan.include_identity, plan.phase_offset, &mut rng)
            })
        })
        .collect())
}

type Density = Matrix2<C64>;

/// Survival probability of one sequence for a given per-pulse phase-noise record.
fn survival_probability(seq: &RbSequence, plan: &RbPlan, noise: &NoiseModel1Q, phase_noise: &[f64]) -> f64 {
    let rabi = FRAC_PI_2 / plan.pulse_duration;
    let angle = FRAC_PI_2 * (1.0 + noise.amplitude_error_frac);
    let q = 2.0 * noise.depolarizing_per_gate;
    let mut rho: Density = ket0() * ket0().adjoint();
    let mut k = 0;
    let apply = |rho: &mut Density, ph: f64, k: &mut usize| {
        let dphi = phase_noise.get(*k).copied().unwrap_or(0.0);
        *k += 1;
        let u = mw_pulse(angle, ph + dphi, noise.detuning_error, rabi);
        *rho = u * *rho * u.adjoint();
    };
    for op in &seq.ops {
        match *op {
            Op::HalfPi(ph) => apply(&mut rho, ph, &mut k),
            Op::PauliZ => rho = pauli_z() * rho * pauli_z(),
            Op::GateEnd => {
                if q > 0.0 {
                    let tr = rho.trace();
                    rho = rho * C64::new(1.0 - q, 0.0) + Density::identity() * (tr * (0.5 * q));
                }
            }
        }
    }
    if let Some(ph) = seq.recovery {
        apply(&mut rho, ph, &mut k);
    }
    let p = rho[(seq.expected, seq.expected)].re.clamp(0.0, 1.0);
    let m = noise.measurement_error;
    (1.0 - m) * p + m * (1.0 - p)
}

fn ou_record<R: Rng + ?Sized>(n: usize, dt: f64, pn: &PhaseNoise, rng: &mut R) -> Vec<f64> {
    let decay = (-dt / pn.correlation_time).exp();
    let kick = pn.amplitude * (1.0 - decay * decay).sqrt();
    let mut x = pn.amplitude * rng.sample::<f64, _>(StandardNormal);
    (0..n)
        .map(|_| {
            let v = x;
            x = x * decay + kick * rng.sample::<f64, _>(StandardNormal);
            v
        })
        .collect()
}

/// Survival counts of one sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RbRecord {
    pub length: u32,
    pub sequence_id: u32,
    pub successes: u32,
    pub shots: u32,
}

/// Simulate every sequence of the plan. Without phase noise the exact survival
/// probability is sampled binomially; with it each shot draws its own record.
pub fn simulate_rb(plan: &RbPlan, noise: &NoiseModel1Q) -> Result<Vec<RbRecord>> {
    let errs = noise.validate("rb_noise.");
    if !errs.is_empty() {
        return Err(Error::Validation(errs));
    }
    let seqs = generate_sequences(plan)?;
    let n = plan.n_sequences;
    seqs.par_iter()
        .enumerate()
        .map(|(idx, seq)| {
            let mut rng = dataset_rng(plan.seed, SIM_STREAM_OFFSET + idx as u64);
            let successes = match &noise.phase_noise {
                Some(pn) if pn.amplitude > 0.0 => {
                    let npulse = seq.physical_pulses + usize::from(seq.recovery.is_some());
                    (0..plan.shots)
                        .filter(|_| {
                            let rec = ou_record(npulse, plan.pulse_duration, pn, &mut rng);
                            rng.gen::<f64>() < survival_probability(seq, plan, noise, &rec)
                        })
                        .count() as u32
                }
                _ => {
                    let p = survival_probability(seq, plan, noise, &[]);
                    Binomial::new(plan.shots as u64, p)
                        .map_err(|e| Error::InvalidParameter(e.to_string()))?
                        .sample(&mut rng) as u32
                }
            };
            Ok(RbRecord { length: seq.length, sequence_id: idx as u32 % n, successes, shots: plan.shots })
        })
        .collect()
}

/// Noise-free-circuit survival probabilities (no sampling), in plan order.
pub fn exact_survival(plan: &RbPlan, noise: &NoiseModel1Q) -> Result<Vec<f64>> {
    let seqs = generate_sequences(plan)?;
    Ok(seqs.par_iter().map(|s| survival_probability(s, plan, noise, &[])).collect())
}

pub fn write_records_csv(records: &[RbRecord], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_records_csv(path: &Path) -> Result<Vec<RbRecord>> {
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize().map(|x| x.map_err(Error::from)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RbResult {
    pub lengths: Vec<u32>,
    pub survival: Vec<f64>,
    pub survival_err: Vec<f64>,
    pub a: f64,
    pub a_err: f64,
    pub p: f64,
    pub p_err: f64,
    /// Fixed asymptote of the decay.
    pub b: f64,
    pub error_per_gate: f64,
    pub error_per_gate_err: f64,
    pub reduced_chi2: f64,
}

/// Fixed asymptote B of the single-qubit decay.
pub const RB_ASYMPTOTE: f64 = 0.5;

/// Fit P(l) = A·p^l + B with B = ½ by weighted least squares on per-length means.
pub fn fit_decay(records: &[RbRecord]) -> Result<RbResult> {
    let mut lengths: Vec<u32> = records.iter().map(|r| r.length).collect();
    lengths.sort_unstable();
    lengths.dedup();
    if lengths.len() < 2 {
        return Err(Error::Fit("decay fit needs at least two sequence lengths".into()));
    }
    let mut survival = Vec::new();
    let mut sigma = Vec::new();
    for &l in &lengths {
        let (s, n) = records
            .iter()
            .filter(|r| r.length == l)
            .fold((0u64, 0u64), |acc, r| (acc.0 + r.successes as u64, acc.1 + r.shots as u64));
        if n == 0 {
            return Err(Error::Fit(format!("no shots at length {l}")));
        }
        let n = n as f64;
        let m = s as f64 / n;
        let mc = m.clamp(0.5 / n, 1.0 - 0.5 / n);
        survival.push(m);
        sigma.push((mc * (1.0 - mc) / n).sqrt());
    }
    let ls: Vec<f64> = lengths.iter().map(|&l| l as f64).collect();
    let b = RB_ASYMPTOTE;
    let first = (survival[0] - b).max(1e-3);
    let last = (survival[survival.len() - 1] - b).max(1e-3);
    let p0 = ((last / first).ln() / (ls[ls.len() - 1] - ls[0])).exp().min(1.0);
    let a0 = first / p0.powf(ls[0]);
    let resid = |x: &[f64]| -> Vec<f64> {
        ls.iter().zip(&survival).zip(&sigma).map(|((&l, &s), &sg)| (x[0] * x[1].powf(l) + b - s) / sg).collect()
    };
    let jac = |x: &[f64]| {
        DMatrix::from_fn(ls.len(), 2, |i, j| {
            let l = ls[i];
            if j == 0 {
                x[1].powf(l) / sigma[i]
            } else {
                x[0] * l * x[1].powf(l - 1.0) / sigma[i]
            }
        })
    };
    let fit = levenberg_marquardt(resid, jac, &[a0, p0], 500)?;
    let (a, p) = (fit.params[0], fit.params[1]);
    if !(a.is_finite() && p.is_finite()) {
        return Err(Error::Fit("decay fit diverged".into()));
    }
    let a_err = fit.covariance[(0, 0)].max(0.0).sqrt();
    let p_err = fit.covariance[(1, 1)].max(0.0).sqrt();
    let dof = (ls.len() as f64 - 2.0).max(1.0);
    Ok(RbResult {
        lengths,
        survival,
        survival_err: sigma,
        a,
        a_err,
        p,
        p_err,
        b,
        error_per_gate: 0.5 * (1.0 - p),
        error_per_gate_err: 0.5 * p_err,
        reduced_chi2: fit.chi2 / dof,
    })
}

/// Expected survival ½ + ½(1 − 2ε)^l under depolarizing noise only.
pub fn depolarizing_survival(eps: f64, length: u32) -> f64 {
    0.5 + 0.5 * (1.0 - 2.0 * eps).powi(length as i32)
}

/// Mean physical π/2 pulses per computational gate over a set of sequences.
pub fn mean_pulses_per_gate(seqs: &[RbSequence]) -> f64 {
    let (p, l) = seqs.iter().fold((0usize, 0u64), |acc, s| (acc.0 + s.physical_pulses, acc.1 + s.length as u64));
    p as f64 / l.max(1) as f64
}
