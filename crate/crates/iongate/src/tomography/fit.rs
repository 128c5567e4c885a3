// Copyright 2026 IonGate Contributors
// SPDX-License-Identifier: Apache-2.0

//! Parity-fringe fits: binomial maximum likelihood and weighted least squares.

use std::f64::consts::PI;

use nalgebra::{Matrix2, Matrix3, Vector2, Vector3};
use serde::{Deserialize, Serialize};
use statrs::function::factorial::ln_binomial;

use super::dataset::{model_probability, ParityDataset};
use crate::error::{Error, Result};
use crate::numerics::brent_minimize;

/// Grid points for the outer φ0 scan over [0, π).
pub const PHASE_SCAN_POINTS: usize = 48;
/// Number of best grid points refined independently.
pub const PHASE_STARTS: usize = 3;
/// Scaled-gradient convergence threshold of the likelihood polish.
pub const GRADIENT_TOL: f64 = 1e-8;
/// Model probabilities closer than this to 0 or 1 mark a boundary fit.
pub const BOUNDARY_EPS: f64 = 1e-7;
/// Rounding allowance on the feasibility constraint |C0| + |C| ≤ 1.
const CONSTRAINT_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitMethod {
    MaximumLikelihood,
    LeastSquares,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub method: FitMethod,
    pub c: f64,
    pub c0: f64,
    /// Canonical phase offset in [0, π).
    pub phi0: f64,
    pub c_err: f64,
    pub c0_err: f64,
    pub phi0_err: f64,
    /// Binomial log-likelihood including the combinatorial constant;
    /// `-inf` when a least-squares solution leaves [0, 1].
    pub log_likelihood: f64,
    pub reduced_chi2: f64,
    /// Optimum touches the p ∈ [0, 1] constraint.
    pub at_boundary: bool,
    /// Final scaled gradient norm (maximum likelihood only).
    pub gradient_norm: f64,
}

impl FitResult {
    pub fn probability(&self, phi: f64) -> f64 {
        model_probability(self.c, self.c0, self.phi0, phi)
    }
}

struct Point {
    phi: f64,
    k: f64,
    n: f64,
}

fn points(data: &ParityDataset) -> Vec<Point> {
    (0..data.len())
        .map(|i| Point { phi: data.phases[i], k: data.even_counts[i] as f64, n: data.total_shots[i] as f64 })
        .collect()
}

fn total_shots(pts: &[Point]) -> f64 {
    pts.iter().map(|p| p.n).sum()
}

/// Binomial log-likelihood without the combinatorial constant; `None` if infeasible.
fn loglik(pts: &[Point], c: f64, c0: f64, phi0: f64) -> Option<f64> {
    if c.abs() + c0.abs() > 1.0 + CONSTRAINT_SLACK {
        return None;
    }
    let mut l = 0.0;
    for pt in pts {
        let p = model_probability(c, c0, phi0, pt.phi);
        let q = 1.0 - p;
        if pt.k > 0.0 {
            if p <= 0.0 {
                return None;
            }
            l += pt.k * p.ln();
        }
        if pt.n - pt.k > 0.0 {
            if q <= 0.0 {
                return None;
            }
            l += (pt.n - pt.k) * q.ln();
        }
        if !(0.0..=1.0).contains(&p) {
            return None;
        }
    }
    Some(l)
}

fn ln_combinatorial(data: &ParityDataset) -> f64 {
    data.even_counts.iter().zip(&data.total_shots).map(|(&k, &n)| ln_binomial(n, k)).sum()
}

/// dℓ/dp and d²ℓ/dp² of one point.
fn derivs(pt: &Point, p: f64) -> (f64, f64) {
    let q = 1.0 - p;
    let m = pt.n - pt.k;
    let mut d1 = 0.0;
    let mut d2 = 0.0;
    if pt.k > 0.0 {
        d1 += pt.k / p;
        d2 -= pt.k / (p * p);
    }
    if m > 0.0 {
        d1 -= m / q;
        d2 -= m / (q * q);
    }
    (d1, d2)
}

/// Gradient and Hessian of ℓ over (C, C0, φ0).
fn grad_hess3(pts: &[Point], c: f64, c0: f64, phi0: f64) -> (Vector3<f64>, Matrix3<f64>) {
    let mut g = Vector3::zeros();
    let mut h = Matrix3::zeros();
    for pt in pts {
        let x = 2.0 * (pt.phi - phi0);
        let (s, co) = x.sin_cos();
        let p = 0.5 * (1.0 + c0 + c * s);
        let (d1, d2) = derivs(pt, p);
        let dp = Vector3::new(0.5 * s, 0.5, -c * co);
        let mut d2p = Matrix3::zeros();
        d2p[(0, 2)] = -co;
        d2p[(2, 0)] = -co;
        d2p[(2, 2)] = -2.0 * c * s;
        g += dp * d1;
        h += dp * dp.transpose() * d2 + d2p * d1;
    }
    (g, h)
}

/// Damped Newton over (C, C0) at fixed φ0, starting from the flat model.
fn profile(pts: &[Point], phi0: f64) -> Option<(f64, f64, f64)> {
    let ntot = total_shots(pts);
    let kbar = pts.iter().map(|p| p.k).sum::<f64>() / ntot;
    let mut c = 0.0;
    let mut c0 = (2.0 * kbar - 1.0).clamp(-0.5, 0.5);
    let mut l = loglik(pts, c, c0, phi0)?;
    for _ in 0..200 {
        let mut g = Vector2::zeros();
        let mut h = Matrix2::zeros();
        for pt in pts {
            let s = (2.0 * (pt.phi - phi0)).sin();
            let p = 0.5 * (1.0 + c0 + c * s);
            let (d1, d2) = derivs(pt, p);
            let dp = Vector2::new(0.5 * s, 0.5);
            g += dp * d1;
            h += dp * dp.transpose() * d2;
        }
        if g.norm() / ntot < 1e-13 {
            break;
        }
        let step = match (-h).cholesky() {
            Some(ch) => ch.solve(&g),
            None => g * (1e-3 / ntot),
        };
        let mut t = 1.0;
        let mut improved = false;
        for _ in 0..60 {
            let (nc, nc0) = (c + t * step[0], c0 + t * step[1]);
            if let Some(nl) = loglik(pts, nc, nc0, phi0) {
                if nl >= l {
                    improved = (nl - l) > 1e-15 * l.abs() || t == 1.0;
                    c = nc;
                    c0 = nc0;
                    l = nl;
                    break;
                }
            }
            t *= 0.5;
        }
        if !improved {
            break;
        }
    }
    Some((c, c0, l))
}

fn canonical(c: f64, phi0: f64) -> (f64, f64) {
    let (c, phi0) = if c < 0.0 { (-c, phi0 + 0.5 * PI) } else { (c, phi0) };
    (c, phi0.rem_euclid(PI))
}

fn reduced_chi2(pts: &[Point], c: f64, c0: f64, phi0: f64) -> f64 {
    let chi2: f64 = pts
        .iter()
        .map(|pt| {
            let p = model_probability(c, c0, phi0, pt.phi);
            let var = (pt.n * p * (1.0 - p)).max(0.25);
            (pt.k - pt.n * p).powi(2) / var
        })
        .sum();
    chi2 / (pts.len() as f64 - 3.0).max(1.0)
}

fn is_boundary(pts: &[Point], c: f64, c0: f64, phi0: f64) -> bool {
    c.abs() + c0.abs() > 1.0 - BOUNDARY_EPS
        || pts.iter().any(|pt| !(BOUNDARY_EPS..=1.0 - BOUNDARY_EPS).contains(&model_probability(c, c0, phi0, pt.phi)))
}

/// Scan φ0, keep the best few grid points and refine each with Brent.
fn scan_phase<F: FnMut(f64) -> f64>(mut cost: F) -> Vec<(f64, f64)> {
    let h = PI / PHASE_SCAN_POINTS as f64;
    let mut grid: Vec<(f64, f64)> = (0..PHASE_SCAN_POINTS).map(|i| (i as f64 * h, cost(i as f64 * h))).collect();
    grid.sort_by(|a, b| a.1.total_cmp(&b.1));
    grid.iter()
        .take(PHASE_STARTS)
        .filter(|(_, v)| v.is_finite())
        .map(|&(x, _)| brent_minimize(&mut cost, x - h, x + h, 1e-12, 200))
        .collect()
}

/// Maximum-likelihood fit of the binomial parity model.
pub fn fit_ml_binomial(data: &ParityDataset) -> Result<FitResult> {
    data.validate()?;
    let pts = points(data);
    let ntot = total_shots(&pts);
    let starts = scan_phase(|phi0| profile(&pts, phi0).map_or(f64::INFINITY, |(_, _, l)| -l));
    let (phi0, _) = starts
        .into_iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or_else(|| Error::Fit("no feasible phase start for the likelihood".into()))?;
    let (mut c, mut c0, mut l) = profile(&pts, phi0).ok_or_else(|| Error::Fit("profile fit infeasible".into()))?;
    let mut phi0 = phi0;

    for _ in 0..100 {
        let (g, h) = grad_hess3(&pts, c, c0, phi0);
        if g.norm() / ntot < GRADIENT_TOL * 1e-3 {
            break;
        }
        let Some(step) = (-h).cholesky().map(|ch| ch.solve(&g)) else { break };
        let slack = 1e-12 * (1.0 + l.abs());
        let mut t = 1.0;
        let mut moved = false;
        for _ in 0..60 {
            let x = Vector3::new(c, c0, phi0) + step * t;
            if let Some(nl) = loglik(&pts, x[0], x[1], x[2]) {
                if nl >= l - slack {
                    moved = x != Vector3::new(c, c0, phi0);
                    c = x[0];
                    c0 = x[1];
                    phi0 = x[2];
                    l = l.max(nl);
                    break;
                }
            }
            t *= 0.5;
        }
        if !moved {
            break;
        }
    }
    let (g, _) = grad_hess3(&pts, c, c0, phi0);
    let gnorm = g.norm() / ntot;
    l = loglik(&pts, c, c0, phi0).unwrap_or(l);
    let at_boundary = is_boundary(&pts, c, c0, phi0);
    if gnorm >= GRADIENT_TOL && !at_boundary {
        return Err(Error::Fit(format!(
            "likelihood fit did not converge: scaled gradient {gnorm:.3e} at C = {c}, C0 = {c0}, φ0 = {phi0}"
        )));
    }
    let (_, h) = grad_hess3(&pts, c, c0, phi0);
    let errs = (-h).try_inverse().map_or([f64::NAN; 3], |cov| {
        [cov[(0, 0)].max(0.0).sqrt(), cov[(1, 1)].max(0.0).sqrt(), cov[(2, 2)].max(0.0).sqrt()]
    });
    let rchi2 = reduced_chi2(&pts, c, c0, phi0);
    let (cc, cphi) = canonical(c, phi0);
    Ok(FitResult {
        method: FitMethod::MaximumLikelihood,
        c: cc,
        c0,
        phi0: cphi,
        c_err: errs[0],
        c0_err: errs[1],
        phi0_err: errs[2],
        log_likelihood: l + ln_combinatorial(data),
        reduced_chi2: rchi2,
        at_boundary,
        gradient_norm: gnorm,
    })
}

struct LsPoint {
    phi: f64,
    y: f64,
    w: f64,
}

fn ls_points(data: &ParityDataset) -> Vec<LsPoint> {
    (0..data.len())
        .map(|i| {
            let n = data.total_shots[i] as f64;
            let phat = data.even_counts[i] as f64 / n;
            let pc = phat.clamp(0.5 / n, 1.0 - 0.5 / n);
            LsPoint { phi: data.phases[i], y: 2.0 * phat - 1.0, w: n / (4.0 * pc * (1.0 - pc)) }
        })
        .collect()
}

/// Weighted linear solve for (C, C0) at fixed φ0; returns (C, C0, χ²).
fn ls_profile(pts: &[LsPoint], phi0: f64) -> (f64, f64, f64) {
    let mut a = Matrix2::zeros();
    let mut b = Vector2::zeros();
    for pt in pts {
        let v = Vector2::new((2.0 * (pt.phi - phi0)).sin(), 1.0);
        a += v * v.transpose() * pt.w;
        b += v * (pt.w * pt.y);
    }
    let x = a.try_inverse().map_or(Vector2::zeros(), |inv| inv * b);
    let chi2 = pts.iter().map(|pt| pt.w * (pt.y - x[1] - x[0] * (2.0 * (pt.phi - phi0)).sin()).powi(2)).sum();
    (x[0], x[1], chi2)
}

/// Least-squares fit of the parity estimate 2k/n − 1 weighted by its
/// estimated binomial variance 4p̂(1 − p̂)/n.
pub fn fit_least_squares(data: &ParityDataset) -> Result<FitResult> {
    data.validate()?;
    let pts = ls_points(data);
    let (phi0, _) = scan_phase(|phi0| ls_profile(&pts, phi0).2)
        .into_iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or_else(|| Error::Fit("least-squares phase scan failed".into()))?;
    let (c, c0, _) = ls_profile(&pts, phi0);
    if !(c.is_finite() && c0.is_finite()) {
        return Err(Error::Fit("least-squares solution not finite".into()));
    }
    let mut jtj = Matrix3::zeros();
    for pt in &pts {
        let x = 2.0 * (pt.phi - phi0);
        let j = Vector3::new(x.sin(), 1.0, -2.0 * c * x.cos());
        jtj += j * j.transpose() * pt.w;
    }
    let errs =
        jtj.try_inverse().map_or([f64::NAN; 3], |cov| [cov[(0, 0)].sqrt(), cov[(1, 1)].sqrt(), cov[(2, 2)].sqrt()]);
    let bin = points(data);
    let l = loglik(&bin, c, c0, phi0).map_or(f64::NEG_INFINITY, |l| l + ln_combinatorial(data));
    let (cc, cphi) = canonical(c, phi0);
    Ok(FitResult {
        method: FitMethod::LeastSquares,
        c: cc,
        c0,
        phi0: cphi,
        c_err: errs[0],
        c0_err: errs[1],
        phi0_err: errs[2],
        log_likelihood: l,
        reduced_chi2: reduced_chi2(&bin, c, c0, phi0),
        at_boundary: c.abs() + c0.abs() > 1.0 || is_boundary(&bin, c, c0, phi0),
        gradient_norm: 0.0,
    })
}

/// Binomial log-likelihood of `data` under given parameters; `-inf` if infeasible.
pub fn log_likelihood(data: &ParityDataset, c: f64, c0: f64, phi0: f64) -> f64 {
    loglik(&points(data), c, c0, phi0).map_or(f64::NEG_INFINITY, |l| l + ln_combinatorial(data))
}
