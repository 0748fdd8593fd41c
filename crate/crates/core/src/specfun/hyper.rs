//! Confluent hypergeometric functions `M(a,b,z) = 1F1(a;b;z)` and `U(a,b,z)`.
//!
//! `M`: Kummer series in double-double for `|z| <= 40` (after Kummer's
//! transformation when `Re z < 0`), otherwise the large-`|z|` connection
//! to two `U` asymptotic series.
//!
//! `U`, tried in order:
//! 1. the asymptotic series `z^{-a} sum (a)_k (a-b+1)_k / k! (-z)^{-k}`,
//!    accepted only when its smallest term is below double precision;
//! 2. for `|z| < 2` and non-integer `b`, the connection formula in terms
//!    of two `M` series;
//! 3. the Laplace integral along the ray `arg t = -arg z`, with the first
//!    parameter shifted up and brought back by backward recurrence
//!    (stable: `U` is the minimal solution as `a` grows), for `|arg z| <= 0.95 pi`;
//! 4. otherwise the connection formula.

use num_complex::Complex64;
use std::f64::consts::PI;

use super::dd::{CDd, Dd};
use super::gamma::{gamma, rgamma};
use super::SpecFunError;
use crate::quad;

/// Largest `|z|` summed by the Kummer series.
pub const M_SERIES_RADIUS: f64 = 40.0;

const MAX_SERIES_TERMS: usize = 6000;
const INTEGER_B_GAP: f64 = 1e-6;
/// Below this `|z|` the connection formula is used for `U` (non-integer `b`).
const CONNECTION_RADIUS: f64 = 2.0;
/// Largest `|arg z|` handled by the rotated Laplace integral.
const INTEGRAL_MAX_ARG: f64 = 0.95 * PI;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn is_nonpositive_integer(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

fn kummer_series(a: Complex64, b: Complex64, z: Complex64) -> Result<Complex64, SpecFunError> {
    let zd = CDd::from_c(z);
    let zn = z.norm();
    let mut term = CDd::ONE;
    let mut sum = CDd::ONE;
    for k in 0..MAX_SERIES_TERMS {
        let kf = k as f64;
        let num = CDd::from_c(a).add_real(kf).mul(zd);
        let den = CDd::from_c(b).add_real(kf).mul(CDd {
            re: Dd::new(kf + 1.0),
            im: Dd::ZERO,
        });
        term = term.mul(num).div(den);
        sum = sum.add(term);
        let t = term.norm1();
        if t == 0.0 {
            return Ok(sum.to_c());
        }
        let ratio_small = (a + kf).norm() * zn < (b + kf).norm() * (kf + 1.0);
        if ratio_small && t <= 1e-33 * sum.norm1() {
            return Ok(sum.to_c());
        }
    }
    Err(SpecFunError::NoConvergence {
        function: "hyp1f1 series",
    })
}

/// Asymptotic series of `U` with an explicit `ln z` (selects the sheet).
/// Returns `None` when the series does not reach double precision.
fn u_asymptotic(a: Complex64, b: Complex64, z: Complex64, lnz: Complex64) -> Option<Complex64> {
    let a2 = a - b + 1.0;
    let mzinv = -1.0 / z;
    let mut term = c(1.0, 0.0);
    let mut sum = term;
    let mut prev = f64::INFINITY;
    for k in 0..400 {
        let kf = k as f64;
        term = term * (a + kf) * (a2 + kf) / (kf + 1.0) * mzinv;
        let t = term.norm();
        if t == 0.0 {
            break;
        }
        if t > prev && k > 2 {
            // divergent tail: accept only if the smallest term was negligible
            if prev <= 2e-15 * sum.norm() {
                break;
            }
            return None;
        }
        sum += term;
        prev = t;
        if t <= 1e-17 * sum.norm() {
            break;
        }
        if k == 399 {
            return None;
        }
    }
    Some((-a * lnz).exp() * sum)
}

/// Kummer's `M(a, b, z)`.
pub fn hyp1f1(a: Complex64, b: Complex64, z: Complex64) -> Result<Complex64, SpecFunError> {
    if is_nonpositive_integer(b) {
        return Err(SpecFunError::ParameterPole {
            function: "hyp1f1",
            parameter: "b",
            value: b.re,
        });
    }
    if z.re < 0.0 {
        return Ok(z.exp() * hyp1f1(b - a, b, -z)?);
    }
    if z.norm() <= M_SERIES_RADIUS || is_nonpositive_integer(a) {
        return kummer_series(a, b, z);
    }
    let lnz = z.ln();
    let i = Complex64::i();
    let s = if z.im > 0.0 { -1.0 } else { 1.0 };
    let u1 = u_asymptotic(a, b, z, lnz);
    let u2 = u_asymptotic(b - a, b, -z, lnz + s * i * PI);
    match (u1, u2) {
        (Some(u1), Some(u2)) => {
            let t1 = (-s * i * PI * a).exp() * rgamma(b - a) * u1;
            let t2 = (s * i * PI * (b - a)).exp() * rgamma(a) * z.exp() * u2;
            Ok(gamma(b)? * (t1 + t2))
        }
        _ => kummer_series(a, b, z),
    }
}

fn u_integral(a: Complex64, b: Complex64, z: Complex64) -> Result<Complex64, SpecFunError> {
    // Laplace integral along the ray t = s e^{-i arg z}, so that z t is real
    // and positive. t^{a-1} oscillates like e^{i Im(a) ln s} near s = 0; the
    // first parameter is raised until s^{Re a - 1} damps those oscillations
    let target = 3.0 + a.im.abs();
    let shift = if a.re < target {
        (target - a.re).ceil() as usize
    } else {
        0
    };
    let top = a + shift as f64;
    let theta = -z.arg();
    let rot = Complex64::from_polar(1.0, theta);
    let zn = z.norm();
    let laplace = |ap: Complex64| -> Result<Complex64, SpecFunError> {
        let scale = ap.norm().max(1.0) / zn;
        let f = |s: f64| {
            let t = rot * s;
            let ln_t = Complex64::new(s.ln(), theta);
            (-zn * s + (ap - 1.0) * ln_t + (b - ap - 1.0) * (t + 1.0).ln()).exp()
        };
        let v = quad::exp_sinh_complex(f, 0.0, scale, 1e-13).map_err(|_| SpecFunError::NoConvergence {
            function: "hyperu integral",
        })?;
        Ok(v * rot * rgamma(ap))
    };
    let mut u_hi = laplace(top)?;
    if shift == 0 {
        return Ok(u_hi);
    }
    let mut u_hi1 = laplace(top + 1.0)?;
    let mut ak = top;
    for _ in 0..shift {
        let u_lo = (2.0 * ak - b + z) * u_hi - ak * (ak - b + 1.0) * u_hi1;
        u_hi1 = u_hi;
        u_hi = u_lo;
        ak -= 1.0;
    }
    Ok(u_hi)
}

fn u_connection(a: Complex64, b: Complex64, z: Complex64) -> Result<Complex64, SpecFunError> {
    let one = c(1.0, 0.0);
    let m1 = kummer_series(a, b, z)?;
    let m2 = kummer_series(a - b + one, 2.0 * one - b, z)?;
    let t1 = gamma(one - b)? * rgamma(a - b + one) * m1;
    let t2 = gamma(b - one)? * rgamma(a) * ((one - b) * z.ln()).exp() * m2;
    Ok(t1 + t2)
}

/// Tricomi's `U(a, b, z)` on the principal branch.
pub fn hyperu(a: Complex64, b: Complex64, z: Complex64) -> Result<Complex64, SpecFunError> {
    if z.re == 0.0 && z.im == 0.0 {
        return Err(SpecFunError::Domain("hyperu at z = 0".into()));
    }
    if let Some(v) = u_asymptotic(a, b, z, z.ln()) {
        return Ok(v);
    }
    let near_int_b = b.im == 0.0 && (b.re - b.re.round()).abs() < INTEGER_B_GAP;
    if !near_int_b && z.norm() < CONNECTION_RADIUS {
        return u_connection(a, b, z);
    }
    if z.arg().abs() <= INTEGRAL_MAX_ARG {
        return u_integral(a, b, z);
    }
    if near_int_b {
        return Err(SpecFunError::Domain(format!(
            "hyperu with integer b = {} is not supported this close to the cut (z = {z})",
            b.re
        )));
    }
    u_connection(a, b, z)
}
