// Copyright 2026 IonGate Contributors
// SPDX-License-Identifier: Apache-2.0

//! Explicit integrators for complex linear ODE systems: adaptive DOP853 and
//! fixed-step classical RK4. Both step exactly onto the requested sample times.

use serde::{Deserialize, Serialize};

use super::C64;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Classical 4th-order Runge-Kutta with step `max_step`.
    FixedRk4,
    /// Dormand-Prince 8(5,3) with error control.
    Adaptive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorConfig {
    pub method: Method,
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Largest step, seconds. Also the step length in fixed-step mode.
    pub max_step: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self { method: Method::Adaptive, rel_tol: 1e-9, abs_tol: 1e-12, max_step: f64::INFINITY }
    }
}

impl IntegratorConfig {
    pub fn fixed(step: f64) -> Self {
        Self { method: Method::FixedRk4, rel_tol: 1e-9, abs_tol: 1e-12, max_step: step }
    }

    pub fn adaptive(rel_tol: f64, abs_tol: f64) -> Self {
        Self { method: Method::Adaptive, rel_tol, abs_tol, max_step: f64::INFINITY }
    }

    pub fn with_max_step(mut self, max_step: f64) -> Self {
        self.max_step = max_step;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::InvalidParameter("integrator tolerances must be > 0".into()));
        }
        if !(self.max_step > 0.0) {
            return Err(Error::InvalidParameter("integrator max_step must be > 0".into()));
        }
        if self.method == Method::FixedRk4 && !self.max_step.is_finite() {
            return Err(Error::InvalidParameter("fixed-step mode needs a finite max_step".into()));
        }
        Ok(())
    }
}

/// Right-hand side of `dy/dt = f(t, y)`.
pub trait OdeRhs {
    fn eval(&mut self, t: f64, y: &[C64], dy: &mut [C64]);
}

/// Integrate from `t0` through every time in `samples` (non-decreasing, ≥ t0).
/// `check` runs after every accepted step and may abort the run.
/// Returns the state at each sample time.
pub fn integrate<F, K>(
    rhs: &mut F,
    y0: &[C64],
    t0: f64,
    samples: &[f64],
    cfg: &IntegratorConfig,
    mut check: K,
) -> Result<Vec<Vec<C64>>>
where
    F: OdeRhs,
    K: FnMut(f64, &[C64]) -> Result<()>,
{
    cfg.validate()?;
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut out = Vec::with_capacity(samples.len());
    let mut stepper = Stepper::new(y.len(), *cfg);
    for &ts in samples {
        if ts < t - 1e-15 * t.abs().max(1.0) {
            return Err(Error::InvalidParameter(format!("sample time {ts:e} precedes {t:e}")));
        }
        stepper.advance(rhs, &mut t, &mut y, ts, &mut check)?;
        out.push(y.clone());
    }
    Ok(out)
}

struct Stepper {
    cfg: IntegratorConfig,
    k: Vec<Vec<C64>>,
    tmp: Vec<C64>,
    ynew: Vec<C64>,
    h: f64,
    k0_valid: bool,
}

impl Stepper {
    fn new(n: usize, cfg: IntegratorConfig) -> Self {
        Self {
            cfg,
            k: vec![vec![C64::new(0.0, 0.0); n]; 12],
            tmp: vec![C64::new(0.0, 0.0); n],
            ynew: vec![C64::new(0.0, 0.0); n],
            h: 0.0,
            k0_valid: false,
        }
    }

    fn advance<F, K>(&mut self, rhs: &mut F, t: &mut f64, y: &mut Vec<C64>, t_end: f64, check: &mut K) -> Result<()>
    where
        F: OdeRhs,
        K: FnMut(f64, &[C64]) -> Result<()>,
    {
        match self.cfg.method {
            Method::FixedRk4 => self.advance_rk4(rhs, t, y, t_end, check),
            Method::Adaptive => self.advance_dop853(rhs, t, y, t_end, check),
        }
    }

    fn advance_rk4<F, K>(&mut self, rhs: &mut F, t: &mut f64, y: &mut [C64], t_end: f64, check: &mut K) -> Result<()>
    where
        F: OdeRhs,
        K: FnMut(f64, &[C64]) -> Result<()>,
    {
        let span = t_end - *t;
        if span <= 0.0 {
            return Ok(());
        }
        let steps = (span / self.cfg.max_step - 1e-9).ceil().max(1.0) as usize;
        let h = span / steps as f64;
        let t_start = *t;
        let n = y.len();
        for s in 0..steps {
            let ts = t_start + s as f64 * h;
            let k = &mut self.k;
            rhs.eval(ts, y, &mut k[0]);
            for i in 0..n {
                self.tmp[i] = y[i] + k[0][i] * (0.5 * h);
            }
            rhs.eval(ts + 0.5 * h, &self.tmp, &mut k[1]);
            for i in 0..n {
                self.tmp[i] = y[i] + k[1][i] * (0.5 * h);
            }
            rhs.eval(ts + 0.5 * h, &self.tmp, &mut k[2]);
            for i in 0..n {
                self.tmp[i] = y[i] + k[2][i] * h;
            }
            rhs.eval(ts + h, &self.tmp, &mut k[3]);
            for i in 0..n {
                y[i] += (k[0][i] + (k[1][i] + k[2][i]) * 2.0 + k[3][i]) * (h / 6.0);
            }
            let tn = if s + 1 == steps { t_end } else { ts + h };
            check(tn, y)?;
        }
        *t = t_end;
        Ok(())
    }

    fn initial_step<F: OdeRhs>(&mut self, rhs: &mut F, t: f64, y: &[C64], span: f64) -> f64 {
        let n = y.len() as f64;
        let (atol, rtol) = (self.cfg.abs_tol, self.cfg.rel_tol);
        let sk = |v: &C64| atol + rtol * v.norm();
        let d0 = (y.iter().map(|v| (v.norm() / sk(v)).powi(2)).sum::<f64>() / n).sqrt();
        let d1 = (self.k[0].iter().zip(y).map(|(f, v)| (f.norm() / sk(v)).powi(2)).sum::<f64>() / n).sqrt();
        let mut h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 * span.max(1e-300) } else { 0.01 * d0 / d1 };
        h0 = h0.min(span).min(self.cfg.max_step);
        for i in 0..y.len() {
            self.tmp[i] = y[i] + self.k[0][i] * h0;
        }
        let mut f1 = vec![C64::new(0.0, 0.0); y.len()];
        rhs.eval(t + h0, &self.tmp, &mut f1);
        let d2 = (f1.iter().zip(&self.k[0]).zip(y).map(|((a, b), v)| ((a - b).norm() / sk(v)).powi(2)).sum::<f64>()
            / n)
            .sqrt()
            / h0;
        let m = d1.max(d2);
        let h1 = if m <= 1e-15 { (h0 * 1e-3).max(1e-6 * span) } else { (0.01 / m).powf(1.0 / 8.0) };
        (100.0 * h0).min(h1).min(span).min(self.cfg.max_step)
    }

    fn advance_dop853<F, K>(
        &mut self,
        rhs: &mut F,
        t: &mut f64,
        y: &mut Vec<C64>,
        t_end: f64,
        check: &mut K,
    ) -> Result<()>
    where
        F: OdeRhs,
        K: FnMut(f64, &[C64]) -> Result<()>,
    {
        let n = y.len();
        if t_end - *t <= 0.0 {
            return Ok(());
        }
        if !self.k0_valid {
            rhs.eval(*t, y, &mut self.k[0]);
            self.k0_valid = true;
        }
        if self.h <= 0.0 {
            self.h = self.initial_step(rhs, *t, y, t_end - *t);
        }
        let (rtol, atol) = (self.cfg.rel_tol, self.cfg.abs_tol);
        let mut rejects_in_row = 0usize;
        let mut last_failed = false;
        loop {
            let remaining = t_end - *t;
            if remaining <= 1e-14 * t_end.abs().max(1e-300) {
                *t = t_end;
                return Ok(());
            }
            let mut h = self.h.min(self.cfg.max_step);
            let hits_end = h >= remaining * (1.0 - 1e-12);
            if hits_end {
                h = remaining;
            }
            if h < 1e-14 * t.abs().max(1e-300) || !h.is_finite() {
                return Err(Error::Integrator { time: *t, reason: format!("step size underflow (h = {h:e})") });
            }
            for s in 1..12 {
                for i in 0..n {
                    let mut acc = C64::new(0.0, 0.0);
                    for (j, &a) in A[s][..s].iter().enumerate() {
                        if a != 0.0 {
                            acc += self.k[j][i] * a;
                        }
                    }
                    self.tmp[i] = y[i] + acc * h;
                }
                rhs.eval(*t + C[s] * h, &self.tmp, &mut self.k[s]);
            }
            let mut err5 = 0.0;
            let mut err3 = 0.0;
            for i in 0..n {
                let mut incr = C64::new(0.0, 0.0);
                let mut e5 = C64::new(0.0, 0.0);
                for j in 0..12 {
                    if B[j] != 0.0 {
                        incr += self.k[j][i] * B[j];
                    }
                    if ER[j] != 0.0 {
                        e5 += self.k[j][i] * ER[j];
                    }
                }
                self.ynew[i] = y[i] + incr * h;
                let sk = atol + rtol * y[i].norm().max(self.ynew[i].norm());
                let e3 = incr - self.k[0][i] * BHH[0] - self.k[8][i] * BHH[1] - self.k[11][i] * BHH[2];
                err5 += (e5.norm() / sk).powi(2);
                err3 += (e3.norm() / sk).powi(2);
            }
            let mut deno = err5 + 0.01 * err3;
            if deno <= 0.0 {
                deno = 1.0;
            }
            let err = h * err5 * (1.0 / (deno * n as f64)).sqrt();
            if !err.is_finite() {
                return Err(Error::Integrator { time: *t, reason: "non-finite error estimate".into() });
            }
            let fac11 = err.powf(1.0 / 8.0);
            let fac = (fac11 / 0.9).clamp(1.0 / 6.0, 3.0);
            let mut h_new = h / fac;
            if err <= 1.0 {
                std::mem::swap(y, &mut self.ynew);
                *t = if hits_end { t_end } else { *t + h };
                rhs.eval(*t, y, &mut self.k[0]);
                if last_failed {
                    h_new = h_new.min(h);
                }
                last_failed = false;
                rejects_in_row = 0;
                check(*t, y)?;
                if !hits_end || h_new > self.h {
                    self.h = h_new;
                }
                if hits_end {
                    return Ok(());
                }
            } else {
                h_new = h / (fac11 / 0.9).min(3.0);
                self.h = h_new;
                last_failed = true;
                rejects_in_row += 1;
                if rejects_in_row > 200 {
                    return Err(Error::Integrator { time: *t, reason: "too many rejected steps".into() });
                }
            }
        }
    }
}

const C: [f64; 12] = [
    0.0,
    5.260_015_195_876_773E-2,
    7.890_022_793_815_16E-2,
    1.183_503_419_072_274E-1,
    2.816_496_580_927_726E-1,
    3.333_333_333_333_333E-1,
    0.25,
    3.076_923_076_923_077E-1,
    6.512_820_512_820_513E-1,
    0.6,
    8.571_428_571_428_571E-1,
    1.0,
];

const A: [[f64; 12]; 12] = [
    [0.0; 12],
    [5.260_015_195_876_773E-2, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.972_505_698_453_79E-2, 5.917_517_095_361_37E-2, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [2.958_758_547_680_685E-2, 0.0, 8.876_275_643_042_054E-2, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [
        2.413_651_341_592_667E-1,
        0.0,
        -8.845_494_793_282_861E-1,
        9.248_340_032_617_92E-1,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        3.703_703_703_703_703_5E-2,
        0.0,
        0.0,
        1.708_286_087_294_738_6E-1,
        1.254_676_875_668_224_2E-1,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        3.7109375E-2,
        0.0,
        0.0,
        1.702_522_110_195_440_5E-1,
        6.021_653_898_045_596E-2,
        -1.7578125E-2,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        3.709_200_011_850_479E-2,
        0.0,
        0.0,
        1.703_839_257_122_399_8E-1,
        1.072_620_304_463_732_8E-1,
        -1.531_943_774_862_440_2E-2,
        8.273_789_163_814_023E-3,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        6.241_109_587_160_757E-1,
        0.0,
        0.0,
        -3.360_892_629_446_941_4,
        -8.682_193_468_417_26E-1,
        2.759_209_969_944_671E1,
        2.015_406_755_047_789_4E1,
        -4.348_988_418_106_996E1,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        4.776_625_364_382_643_4E-1,
        0.0,
        0.0,
        -2.488_114_619_971_667_7,
        -5.902_908_268_368_43E-1,
        2.123_005_144_818_119_3E1,
        1.527_923_363_288_242_3E1,
        -3.328_821_096_898_486E1,
        -2.033_120_170_850_862_7E-2,
        0.0,
        0.0,
        0.0,
    ],
    [
        -9.371_424_300_859_873E-1,
        0.0,
        0.0,
        5.186_372_428_844_064,
        1.091_437_348_996_729_5,
        -8.149_787_010_746_927,
        -1.852_006_565_999_696E1,
        2.273_948_709_935_050_5E1,
        2.493_605_552_679_652_3,
        -3.046_764_471_898_219_6,
        0.0,
        0.0,
    ],
    [
        2.273_310_147_516_538,
        0.0,
        0.0,
        -1.053_449_546_673_725E1,
        -2.000_872_058_224_862_5,
        -1.795_893_186_311_88E1,
        2.794_888_452_941_996E1,
        -2.858_998_277_135_023_5,
        -8.872_856_933_530_63,
        1.236_056_717_579_430_3E1,
        6.433_927_460_157_636E-1,
        0.0,
    ],
];

const B: [f64; 12] = [
    5.429_373_411_656_876_5E-2,
    0.0,
    0.0,
    0.0,
    0.0,
    4.450_312_892_752_409,
    1.891_517_899_314_500_3,
    -5.801_203_960_010_585,
    3.111_643_669_578_199E-1,
    -1.521_609_496_625_161E-1,
    2.013_654_008_040_303_4E-1,
    4.471_061_572_777_259E-2,
];

const ER: [f64; 12] = [
    1.312_004_499_419_488E-2,
    0.0,
    0.0,
    0.0,
    0.0,
    -1.225_156_446_376_204_4,
    -4.957_589_496_572_502E-1,
    1.664_377_182_454_986_4,
    -3.503_288_487_499_736_6E-1,
    3.341_791_187_130_175E-1,
    8.192_320_648_511_571E-2,
    -2.235_530_786_388_629_4E-2,
];

const BHH: [f64; 3] = [2.440_944_881_889_764E-1, 7.338_466_882_816_118E-1, 2.205_882_352_941_176_6E-2];
