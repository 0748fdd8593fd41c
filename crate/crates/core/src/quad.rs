//! Quadrature rules.
//!
//! * `tanh_sinh` on finite intervals (tolerates endpoint singularities),
//! * `exp_sinh` on `[a, inf)` for integrands that decay at infinity,
//! * fixed-order Gauss–Chebyshev rules of the first and second kind.
//!
//! The double-exponential rules refine by halving the step until two
//! successive levels agree to the requested relative tolerance.

use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadError {
    #[error("quadrature did not reach tolerance {tol:e} (last change {change:e})")]
    NotConverged { tol: f64, change: f64 },
    #[error("integrand returned a non-finite value at x = {x}")]
    NonFinite { x: f64 },
}

const MAX_LEVEL: usize = 12;
const MIN_LEVEL: usize = 4;
const TANH_SINH_TMAX: f64 = 6.0;
const EXP_SINH_TMIN: f64 = -4.5;
const EXP_SINH_TMAX: f64 = 4.5;

fn finite(v: Complex64) -> bool {
    v.re.is_finite() && v.im.is_finite()
}

/// Runs the level-doubling driver. `sum_at(h, odd_only)` returns the raw sum
/// of `w f` over nodes `k h` (all `k`, or odd `k` only).
fn refine<S>(tol: f64, mut sum_at: S) -> Result<Complex64, QuadError>
where
    S: FnMut(f64, bool) -> Result<Complex64, QuadError>,
{
    let mut h = 1.0;
    let mut raw = sum_at(h, false)?;
    let mut est = raw * h;
    let mut change = f64::INFINITY;
    for level in 1..=MAX_LEVEL {
        h *= 0.5;
        raw += sum_at(h, true)?;
        let next = raw * h;
        change = (next - est).norm();
        est = next;
        if level >= MIN_LEVEL && change <= tol * est.norm().max(f64::MIN_POSITIVE) {
            return Ok(est);
        }
        if level >= MIN_LEVEL && est.norm() == 0.0 && change == 0.0 {
            return Ok(est);
        }
    }
    Err(QuadError::NotConverged { tol, change })
}

/// Complex tanh-sinh quadrature of `f` over `[a, b]`.
pub fn tanh_sinh_complex<F>(f: F, a: f64, b: f64, tol: f64) -> Result<Complex64, QuadError>
where
    F: Fn(f64) -> Complex64,
{
    let c = 0.5 * (a + b);
    let d = 0.5 * (b - a);
    refine(tol, |h, odd| {
        let mut s = Complex64::new(0.0, 0.0);
        let n = (TANH_SINH_TMAX / h).ceil() as i64;
        let step = if odd { 2 } else { 1 };
        let start = if odd { 1 } else { 0 };
        let mut k = start;
        while k <= n {
            let t = k as f64 * h;
            let u = FRAC_PI_2 * t.sinh();
            let ch = u.cosh();
            let w = d * FRAC_PI_2 * t.cosh() / (ch * ch);
            // distance to the nearer endpoint, d (1 - tanh u), without cancellation
            let gap = d * (-u).exp() / ch;
            for (sign, first) in [(1.0, true), (-1.0, false)] {
                if k == 0 && !first {
                    continue;
                }
                let x = if k == 0 {
                    c
                } else if sign > 0.0 {
                    b - gap
                } else {
                    a + gap
                };
                if x <= a.min(b) || x >= a.max(b) || w == 0.0 || gap == 0.0 {
                    continue;
                }
                let v = f(x);
                if !finite(v) {
                    return Err(QuadError::NonFinite { x });
                }
                s += w * v;
            }
            k += step;
        }
        Ok(s)
    })
}

/// Real tanh-sinh quadrature of `f` over `[a, b]`.
pub fn tanh_sinh<F>(f: F, a: f64, b: f64, tol: f64) -> Result<f64, QuadError>
where
    F: Fn(f64) -> f64,
{
    tanh_sinh_complex(|x| Complex64::new(f(x), 0.0), a, b, tol).map(|v| v.re)
}

/// Complex exp-sinh quadrature of `f` over `[a, inf)`. `scale` sets the
/// length over which the integrand decays.
pub fn exp_sinh_complex<F>(f: F, a: f64, scale: f64, tol: f64) -> Result<Complex64, QuadError>
where
    F: Fn(f64) -> Complex64,
{
    refine(tol, |h, odd| {
        let mut s = Complex64::new(0.0, 0.0);
        let kmin = (EXP_SINH_TMIN / h).floor() as i64;
        let kmax = (EXP_SINH_TMAX / h).ceil() as i64;
        let mut tiny_run = 0;
        for k in kmin..=kmax {
            if odd && k.rem_euclid(2) == 0 {
                continue;
            }
            let t = k as f64 * h;
            let e = (FRAC_PI_2 * t.sinh()).exp();
            let x = a + scale * e;
            let w = scale * FRAC_PI_2 * t.cosh() * e;
            if x <= a || !x.is_finite() {
                continue;
            }
            let v = f(x);
            if !finite(v) {
                return Err(QuadError::NonFinite { x });
            }
            let term = w * v;
            s += term;
            if t > 0.0 && term.norm() <= 1e-300 {
                tiny_run += 1;
                if tiny_run > 3 {
                    break;
                }
            } else {
                tiny_run = 0;
            }
        }
        Ok(s)
    })
}

/// Real exp-sinh quadrature of `f` over `[a, inf)`.
pub fn exp_sinh<F>(f: F, a: f64, scale: f64, tol: f64) -> Result<f64, QuadError>
where
    F: Fn(f64) -> f64,
{
    exp_sinh_complex(|x| Complex64::new(f(x), 0.0), a, scale, tol).map(|v| v.re)
}

/// `int_a^b f(x) / sqrt((b-x)(x-a)) dx` with the `n`-point Gauss–Chebyshev
/// rule of the first kind.
pub fn gauss_chebyshev_first<F>(f: F, a: f64, b: f64, n: usize) -> f64
where
    F: Fn(f64) -> f64,
{
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let nf = n as f64;
    let s: f64 = (1..=n)
        .map(|k| {
            let th = (2.0 * k as f64 - 1.0) * PI / (2.0 * nf);
            f(mid + half * th.cos())
        })
        .sum();
    PI / nf * s
}

/// `int_a^b f(x) sqrt((b-x)(x-a)) dx` with the `n`-point Gauss–Chebyshev
/// rule of the second kind.
pub fn gauss_chebyshev_second<F>(f: F, a: f64, b: f64, n: usize) -> f64
where
    F: Fn(f64) -> f64,
{
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let np1 = n as f64 + 1.0;
    let s: f64 = (1..=n)
        .map(|k| {
            let th = k as f64 * PI / np1;
            let st = th.sin();
            st * st * f(mid + half * th.cos())
        })
        .sum();
    half * half * PI / np1 * s
}
