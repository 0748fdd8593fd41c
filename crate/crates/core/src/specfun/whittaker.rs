//! Whittaker functions `M_{kappa,m}(z)` and `W_{kappa,m}(z)`.

use num_complex::Complex64;

use super::hyper::{hyp1f1, hyperu};
use super::SpecFunError;

/// Side of the negative real axis to evaluate on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BranchSide {
    Above,
    Below,
}

fn on_cut(z: Complex64) -> bool {
    z.im == 0.0 && z.re < 0.0
}

fn place(z: Complex64, side: BranchSide) -> Complex64 {
    if !on_cut(z) {
        return z;
    }
    match side {
        BranchSide::Above => Complex64::new(z.re, 0.0),
        BranchSide::Below => Complex64::new(z.re, -0.0),
    }
}

fn prefactor(m: f64, z: Complex64) -> Complex64 {
    (-0.5 * z + (m + 0.5) * z.ln()).exp()
}

fn check(m: f64, z: Complex64) -> Result<(), SpecFunError> {
    if !m.is_finite() {
        return Err(SpecFunError::Domain(format!(
            "Whittaker index m must be finite, got {m}"
        )));
    }
    if z.re == 0.0 && z.im == 0.0 {
        return Err(SpecFunError::Domain("Whittaker functions need z != 0".into()));
    }
    Ok(())
}

fn m_core(kappa: Complex64, m: f64, z: Complex64) -> Result<Complex64, SpecFunError> {
    check(m, z)?;
    let b = 1.0 + 2.0 * m;
    if b <= 0.0 && b == b.round() {
        return Err(SpecFunError::ParameterPole {
            function: "whittaker_m",
            parameter: "1+2m",
            value: b,
        });
    }
    let a = Complex64::new(m + 0.5, 0.0) - kappa;
    Ok(prefactor(m, z) * hyp1f1(a, Complex64::new(b, 0.0), z)?)
}

fn w_core(kappa: Complex64, m: f64, z: Complex64) -> Result<Complex64, SpecFunError> {
    check(m, z)?;
    let a = Complex64::new(m + 0.5, 0.0) - kappa;
    Ok(prefactor(m, z) * hyperu(a, Complex64::new(1.0 + 2.0 * m, 0.0), z)?)
}

/// `M_{kappa,m}(z) = e^{-z/2} z^{m+1/2} M(m - kappa + 1/2, 1 + 2m, z)`.
pub fn whittaker_m(kappa: Complex64, m: f64, z: Complex64) -> Result<Complex64, SpecFunError> {
    if on_cut(z) {
        return Err(SpecFunError::BranchCut {
            function: "whittaker_m",
            z: z.re,
        });
    }
    m_core(kappa, m, z)
}

/// `W_{kappa,m}(z) = e^{-z/2} z^{m+1/2} U(m - kappa + 1/2, 1 + 2m, z)`.
pub fn whittaker_w(kappa: Complex64, m: f64, z: Complex64) -> Result<Complex64, SpecFunError> {
    if on_cut(z) {
        return Err(SpecFunError::BranchCut {
            function: "whittaker_w",
            z: z.re,
        });
    }
    w_core(kappa, m, z)
}

/// `whittaker_m` with an explicit side for `z` on the negative real axis.
pub fn whittaker_m_on(kappa: Complex64, m: f64, z: Complex64, side: BranchSide) -> Result<Complex64, SpecFunError> {
    m_core(kappa, m, place(z, side))
}

/// `whittaker_w` with an explicit side for `z` on the negative real axis.
pub fn whittaker_w_on(kappa: Complex64, m: f64, z: Complex64, side: BranchSide) -> Result<Complex64, SpecFunError> {
    w_core(kappa, m, place(z, side))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::gamma::{gamma, rgamma};
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    const M559: f64 = 0.559_016_994_374_947_4;

    // plain double Kummer series, independent of the library path
    fn kummer_plain(a: f64, b: f64, z: f64) -> f64 {
        let mut t = 1.0;
        let mut s = 1.0;
        for k in 0..200 {
            let k = k as f64;
            t *= (a + k) * z / ((b + k) * (k + 1.0));
            s += t;
        }
        s
    }

    #[test]
    fn reference_point_kappa_one() {
        let (kappa, m, z) = (1.0, M559, 1.0);
        let mv = whittaker_m(c(kappa, 0.0), m, c(z, 0.0)).unwrap();
        let want_m = (-0.5f64).exp() * kummer_plain(m - kappa + 0.5, 1.0 + 2.0 * m, z);
        assert_relative_eq!(mv.re, want_m, max_relative = 1e-13);
        assert!(mv.im.abs() < 1e-15);

        // W from the connection formula in plain doubles
        let a = m - kappa + 0.5;
        let b = 1.0 + 2.0 * m;
        let g = |x: f64| gamma(c(x, 0.0)).unwrap().re;
        let u = g(1.0 - b) / g(a - b + 1.0) * kummer_plain(a, b, z)
            + g(b - 1.0) / g(a) * z.powf(1.0 - b) * kummer_plain(a - b + 1.0, 2.0 - b, z);
        let wv = whittaker_w(c(kappa, 0.0), m, c(z, 0.0)).unwrap();
        assert_relative_eq!(wv.re, (-0.5f64).exp() * u, max_relative = 1e-12);
    }

    #[test]
    #[allow(clippy::excessive_precision)]
    fn thirty_digit_reference_values() {
        // (kappa, z, W, M) from an independent 30-digit evaluation, m = sqrt(5)/4
        let cases = [
            (
                c(2.3, 0.0),
                c(0.8, 0.0),
                c(-0.739_024_547_208_782_56, 0.0),
                c(0.289_243_283_985_315_6, 0.0),
            ),
            (
                c(0.0, 1.7),
                c(0.0, -0.9),
                c(-2.445_166_952_019_179_2, 8.379_454_772_630_770_8),
                c(-0.034_395_415_684_245_15, -0.369_961_892_063_329_71),
            ),
            (
                c(0.0, -3.1),
                c(0.0, 2.5),
                c(83.708_777_701_917_123, 6.123_029_054_550_550_6),
                c(0.026_353_670_336_965_049, -0.283_463_756_629_136_08),
            ),
            (
                c(6.7, 0.0),
                c(12.0, 0.0),
                c(-671.274_535_944_713_43, 0.0),
                c(0.043_400_501_380_048_537, 0.0),
            ),
            (
                c(-4.0, 0.0),
                c(3.0, 0.0),
                c(1.110_988_636_227_995e-4, 0.0),
                c(142.554_738_537_192_57, 0.0),
            ),
            (
                c(0.0, 5.0),
                c(0.0, 30.0),
                c(2.773_592_036_353_523_1e-4, 4.255_814_573_920_262e-4),
                c(-87_950.530_390_203_573, 946_008.181_143_666_51),
            ),
        ];
        for (kappa, z, w, m) in cases {
            let gw = whittaker_w(kappa, M559, z).unwrap();
            let gm = whittaker_m(kappa, M559, z).unwrap();
            assert!((gw - w).norm() < 1e-12 * w.norm(), "W kappa={kappa} z={z}: {gw} vs {w}");
            assert!((gm - m).norm() < 1e-12 * m.norm(), "M kappa={kappa} z={z}: {gm} vs {m}");
        }
    }

    #[test]
    fn limiting_forms() {
        let (kappa, m) = (c(0.8, 0.0), 0.75);
        let z = 1e-8;
        let mv = whittaker_m(kappa, m, c(z, 0.0)).unwrap();
        assert_relative_eq!(mv.re / z.powf(m + 0.5), 1.0, max_relative = 1e-7);
        let z = 600.0;
        let wv = whittaker_w(kappa, m, c(z, 0.0)).unwrap();
        let lead = (-0.5 * z).exp() * z.powf(kappa.re);
        assert_relative_eq!(wv.re / lead, 1.0, max_relative = 1e-3);
    }

    fn deriv(f: &dyn Fn(Complex64) -> Complex64, z: Complex64, h: f64) -> Complex64 {
        // sixth-order central difference
        let d1 = f(z + h) - f(z - h);
        let d2 = f(z + 2.0 * h) - f(z - 2.0 * h);
        let d3 = f(z + 3.0 * h) - f(z - 3.0 * h);
        (45.0 * d1 - 9.0 * d2 + d3) / (60.0 * h)
    }

    #[test]
    fn wronskian() {
        for &(kappa, m, z) in &[
            (c(1.0, 0.0), M559, c(1.5, 0.0)),
            (c(3.3, 0.0), 0.75, c(4.0, 0.0)),
            (c(-2.0, 0.0), M559, c(0.7, 0.0)),
            (c(0.0, -1.7), M559, c(0.0, 2.2)),
            (c(0.0, 2.5), 1.1, c(0.0, -3.0)),
        ] {
            let fm = |x: Complex64| whittaker_m(kappa, m, x).unwrap();
            let fw = |x: Complex64| whittaker_w(kappa, m, x).unwrap();
            let h = 1e-3 * z.norm().max(1.0);
            let dir = z / z.norm();
            // derivative along the ray through z (analytic functions)
            let gm = |s: f64| fm(z + dir * s);
            let gw = |s: f64| fw(z + dir * s);
            let dm = deriv(&|s: Complex64| gm(s.re), c(0.0, 0.0), h) / dir;
            let dw = deriv(&|s: Complex64| gw(s.re), c(0.0, 0.0), h) / dir;
            let wr = fm(z) * dw - dm * fw(z);
            let want = -gamma(c(1.0 + 2.0 * m, 0.0)).unwrap() * rgamma(c(0.5 + m, 0.0) - kappa);
            assert!(
                (wr - want).norm() < 1e-8 * want.norm().max(1.0),
                "kappa={kappa} z={z}: {wr} vs {want}"
            );
        }
    }

    #[test]
    fn branch_cut_needs_a_side() {
        let kappa = c(0.4, 0.0);
        assert!(matches!(
            whittaker_w(kappa, M559, c(-2.0, 0.0)),
            Err(SpecFunError::BranchCut { .. })
        ));
        let above = whittaker_w_on(kappa, M559, c(-2.0, 0.0), BranchSide::Above).unwrap();
        let below = whittaker_w_on(kappa, M559, c(-2.0, 0.0), BranchSide::Below).unwrap();
        let near = whittaker_w(kappa, M559, c(-2.0, 1e-9)).unwrap();
        assert!((above - near).norm() < 1e-7 * near.norm());
        assert!((below - above.conj()).norm() < 1e-12 * above.norm());
        assert!(whittaker_m(kappa, M559, c(0.0, 0.0)).is_err());
        assert!(matches!(
            whittaker_m(kappa, -1.0, c(1.0, 0.0)),
            Err(SpecFunError::ParameterPole { .. })
        ));
    }

    #[test]
    fn conjugation_symmetry_for_real_parameters() {
        for &z in &[c(1.0, 2.0), c(-3.0, 0.5), c(0.2, -6.0)] {
            let a = whittaker_w(c(1.3, 0.0), M559, z.conj()).unwrap();
            let b = whittaker_w(c(1.3, 0.0), M559, z).unwrap().conj();
            assert!((a - b).norm() < 1e-12 * b.norm());
            let a = whittaker_m(c(1.3, 0.0), M559, z.conj()).unwrap();
            let b = whittaker_m(c(1.3, 0.0), M559, z).unwrap().conj();
            assert!((a - b).norm() < 1e-12 * b.norm());
        }
    }
}
