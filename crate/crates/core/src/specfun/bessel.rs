//! Modified Bessel function of the first kind, `I_nu(z)`, real order `nu >= 0`.
//!
//! Inside `|z| <= 25 + nu^2` the ascending series is summed in double-double,
//! which keeps full double accuracy even when the terms cancel (imaginary `z`).
//! Outside, the Hankel expansion including its exponentially small partner
//! is used. Arguments with `|Re z| > 700` overflow and are rejected.

use num_complex::Complex64;
use std::f64::consts::PI;

use super::dd::{CDd, Dd};
use super::gamma::{ln_gamma_real, rgamma};
use super::SpecFunError;

/// `|Re z|` above which `I_nu(z)` is reported as an overflow.
pub const BESSEL_OVERFLOW_RE: f64 = 700.0;

const MAX_TERMS: usize = 2000;

fn series_radius(nu: f64) -> f64 {
    25.0 + nu * nu
}

fn check_order(nu: f64) -> Result<(), SpecFunError> {
    if !nu.is_finite() || nu < 0.0 {
        return Err(SpecFunError::Domain(format!(
            "Bessel order must be finite and >= 0, got {nu}"
        )));
    }
    Ok(())
}

/// `sum_k (z^2/4)^k / (k! (nu+1)_k)` in double-double.
fn ascending_sum(nu: f64, z: Complex64) -> Result<Complex64, SpecFunError> {
    let zh = CDd::from_c(z).mul(CDd::from_c(Complex64::new(0.5, 0.0)));
    let w = zh.mul(zh);
    let wn = w.to_c().norm();
    let mut term = CDd::ONE;
    let mut sum = CDd::ONE;
    for k in 1..MAX_TERMS {
        let kf = k as f64;
        let den = Dd::new(kf).mul(Dd::new(nu).add(Dd::new(kf)));
        let t = term.mul(w);
        term = CDd {
            re: t.re.div(den),
            im: t.im.div(den),
        };
        sum = sum.add(term);
        if kf * (kf + nu) > wn && term.norm1() <= 1e-33 * sum.norm1().max(1e-300) {
            return Ok(sum.to_c());
        }
        if term.norm1() == 0.0 {
            return Ok(sum.to_c());
        }
    }
    Err(SpecFunError::NoConvergence {
        function: "bessel_i series",
    })
}

fn hankel_sums(nu: f64, w: Complex64) -> (Complex64, Complex64) {
    // returns (sum (-1)^k a_k / w^k, sum a_k / w^k)
    let mu4 = 4.0 * nu * nu;
    let winv = 1.0 / w;
    let mut a = Complex64::new(1.0, 0.0);
    let mut alt = a;
    let mut plain = a;
    let mut prev = f64::INFINITY;
    for k in 1..200 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        a = a * (mu4 - odd * odd) / (8.0 * kf) * winv;
        let an = a.norm();
        if an > prev || an == 0.0 {
            break;
        }
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        alt += sign * a;
        plain += a;
        prev = an;
        if an < 1e-17 * alt.norm() {
            break;
        }
    }
    (alt, plain)
}

/// Hankel expansion for `Re w >= 0`, `|w|` large.
fn hankel_right_half(nu: f64, w: Complex64) -> Complex64 {
    let (alt, plain) = hankel_sums(nu, w);
    let root = (2.0 * PI * w).sqrt();
    let lead = w.exp() / root * alt;
    if w.im == 0.0 {
        return lead;
    }
    let s = if w.im > 0.0 { 1.0 } else { -1.0 };
    let i = Complex64::i();
    let phase = (s * i * nu * PI).exp();
    lead + s * i * phase * (-w).exp() / root * plain
}

/// `I_nu(z)` on the principal branch. The side of the cut along the negative
/// real axis follows the sign of a zero imaginary part.
pub fn bessel_i(nu: f64, z: Complex64) -> Result<Complex64, SpecFunError> {
    check_order(nu)?;
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(SpecFunError::Domain(format!("bessel_i of non-finite {z}")));
    }
    if z.re.abs() > BESSEL_OVERFLOW_RE {
        return Err(SpecFunError::Overflow {
            function: "bessel_i",
            threshold: BESSEL_OVERFLOW_RE,
        });
    }
    if z.re == 0.0 && z.im == 0.0 {
        return Ok(Complex64::new(if nu == 0.0 { 1.0 } else { 0.0 }, 0.0));
    }
    if z.norm() <= series_radius(nu) {
        let s = ascending_sum(nu, z)?;
        let pow = if nu == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            (nu * (z * 0.5).ln()).exp()
        };
        return Ok(pow * rgamma(Complex64::new(nu + 1.0, 0.0)) * s);
    }
    if z.re >= 0.0 {
        return Ok(hankel_right_half(nu, z));
    }
    // z = w e^{+-i pi} with Re w > 0
    let s = if z.im.is_sign_positive() { 1.0 } else { -1.0 };
    let phase = (Complex64::i() * (s * nu * PI)).exp();
    Ok(phase * hankel_right_half(nu, -z))
}

/// `e^{-x} I_nu(x)` for real `x >= 0`; never overflows.
pub fn bessel_i_scaled(nu: f64, x: f64) -> Result<f64, SpecFunError> {
    check_order(nu)?;
    if !(x.is_finite() && x >= 0.0) {
        return Err(SpecFunError::Domain(format!(
            "bessel_i_scaled needs finite x >= 0, got {x}"
        )));
    }
    if x == 0.0 {
        return Ok(if nu == 0.0 { 1.0 } else { 0.0 });
    }
    if x <= series_radius(nu) {
        let w = 0.25 * x * x;
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut k = 1usize;
        loop {
            let kf = k as f64;
            term *= w / (kf * (nu + kf));
            sum += term;
            if (kf * (kf + nu) > w && term < 1e-17 * sum) || k > MAX_TERMS {
                break;
            }
            k += 1;
        }
        let lpre = nu * (0.5 * x).ln() - x - ln_gamma_real(nu + 1.0)?;
        return Ok(lpre.exp() * sum);
    }
    let (alt, _) = hankel_sums(nu, Complex64::new(x, 0.0));
    Ok(alt.re / (2.0 * PI * x).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Integral representation, valid for Re z > 0.
    fn integral_oracle(nu: f64, z: Complex64) -> Complex64 {
        let f1 = |th: f64| (z * th.cos()).exp() * (nu * th).cos();
        let a = quad::tanh_sinh_complex(f1, 0.0, PI, 1e-14).unwrap();
        let mut out = a / PI;
        if (nu * PI).sin().abs() > 0.0 {
            let f2 = |t: f64| (-z * t.cosh() - nu * t).exp();
            let b = quad::exp_sinh_complex(f2, 0.0, 1.0, 1e-14).unwrap();
            out -= (nu * PI).sin() / PI * b;
        }
        out
    }

    #[test]
    fn half_order_closed_form() {
        let v = bessel_i(0.5, c(1.0, 0.0)).unwrap();
        assert_relative_eq!(v.re, (2.0 / PI).sqrt() * 1f64.sinh(), max_relative = 1e-14);
        assert_relative_eq!(v.re, 0.937_674_888_245_488_1, max_relative = 1e-14);
        // I_{3/2}(z) = sqrt(2/(pi z)) (cosh z - sinh z / z), across the switchover
        for &x in &[0.3, 5.0, 26.0, 40.0, 300.0] {
            let want = (2.0 / (PI * x)).sqrt() * (x.cosh() - x.sinh() / x);
            let got = bessel_i(1.5, c(x, 0.0)).unwrap();
            assert_relative_eq!(got.re, want, max_relative = 1e-13);
            let scaled = bessel_i_scaled(1.5, x).unwrap();
            assert_relative_eq!(scaled, want * (-x).exp(), max_relative = 1e-13);
        }
    }

    #[test]
    fn zero_argument_and_small_argument_leading_term() {
        assert_eq!(bessel_i(1.118, c(0.0, 0.0)).unwrap(), c(0.0, 0.0));
        assert_eq!(bessel_i(0.0, c(0.0, 0.0)).unwrap(), c(1.0, 0.0));
        let nu = 1.3;
        let z = c(1e-6, 2e-6);
        let lead = (nu * (z / 2.0).ln()).exp() * rgamma(c(nu + 1.0, 0.0));
        assert!((bessel_i(nu, z).unwrap() - lead).norm() < 1e-11 * lead.norm());
    }

    #[test]
    fn matches_integral_representation() {
        for &nu in &[0.0, 0.5, 1.118_033_988_749_895, 2.25, 3.0] {
            for &z in &[c(2.0, 0.0), c(0.3, 4.0), c(7.0, -6.0), c(0.5, 9.9), c(10.0, 0.0)] {
                let got = bessel_i(nu, z).unwrap();
                let want = integral_oracle(nu, z);
                assert!(
                    (got - want).norm() <= 1e-10 * want.norm().max(1e-3),
                    "nu={nu} z={z}: {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn imaginary_argument_is_bessel_j() {
        // I_nu(i y) = e^{i nu pi/2} J_nu(y); J_{1/2}(y) = sqrt(2/(pi y)) sin y
        for &y in &[3.0, 24.0, 27.0, 60.0, 200.0] {
            let got = bessel_i(0.5, c(0.0, y)).unwrap();
            let want = Complex64::from_polar(1.0, PI / 4.0) * (2.0 / (PI * y)).sqrt() * y.sin();
            assert!(
                (got - want).norm() < 1e-13 * (2.0 / (PI * y)).sqrt(),
                "y={y}: {got} vs {want}"
            );
        }
    }

    #[test]
    fn series_and_hankel_agree_at_switchover() {
        let nu = 1.118_033_988_749_895;
        let r = series_radius(nu);
        for &th in &[0.0, 0.7, 1.5] {
            let z = Complex64::from_polar(r, th);
            let pow = (nu * (z * 0.5).ln()).exp();
            let a = pow * rgamma(c(nu + 1.0, 0.0)) * ascending_sum(nu, z).unwrap();
            let b = hankel_right_half(nu, z);
            assert!((a - b).norm() < 1e-13 * a.norm(), "th={th}: {a} vs {b}");
        }
    }

    #[test]
    fn branch_side_from_signed_zero() {
        let nu = 0.3;
        let up = bessel_i(nu, c(-2.0, 0.0)).unwrap();
        let down = bessel_i(nu, c(-2.0, -0.0)).unwrap();
        let base = bessel_i(nu, c(2.0, 0.0)).unwrap();
        assert!((up - base * Complex64::from_polar(1.0, nu * PI)).norm() < 1e-14);
        assert!((down - base * Complex64::from_polar(1.0, -nu * PI)).norm() < 1e-14);
    }

    #[test]
    fn overflow_is_reported() {
        match bessel_i(1.0, c(800.0, 0.0)) {
            Err(SpecFunError::Overflow { threshold, .. }) => assert_eq!(threshold, BESSEL_OVERFLOW_RE),
            other => panic!("expected overflow, got {other:?}"),
        }
        assert!(bessel_i(-1.0, c(1.0, 0.0)).is_err());
        assert!(bessel_i_scaled(1.0, 1e5).unwrap().is_finite());
    }

    #[test]
    fn conjugation_symmetry() {
        for &z in &[c(1.0, 2.0), c(-3.0, 30.0), c(40.0, -7.0)] {
            let a = bessel_i(1.7, z.conj()).unwrap();
            let b = bessel_i(1.7, z).unwrap().conj();
            assert!((a - b).norm() <= 1e-14 * b.norm());
        }
    }
}
