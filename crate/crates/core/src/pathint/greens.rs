//! Energy Green's functions as Whittaker products
//!
//! ```text
//! G^(+-) = -+ (hbar w)^-1 Gamma((1+mu)/2 -+ kappa)/Gamma(1+mu) (r1 r2)^-1/2
//!          W_{+-kappa, mu/2}(+- c r>^2) M_{+-kappa, mu/2}(+- c r<^2)
//! ```
//!
//! with `kappa = E/(2 hbar w)` and `c = M w/hbar`. The hyperbolic function is
//! the same closed form at `w -> -i w`.

use num_complex::Complex64;

use super::{KernelKind, KernelValue, PathIntError};
use crate::algebra::ConformalModel;
use crate::specfun::{gamma, rgamma, whittaker_m, whittaker_w};

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum GreensSide {
    Retarded,
    Advanced,
}

impl GreensSide {
    fn sign(self) -> f64 {
        match self {
            GreensSide::Retarded => 1.0,
            GreensSide::Advanced => -1.0,
        }
    }
}

/// Offset `epsilon / (hbar omega)` used for regularized evaluation.
const REGULARIZATION: f64 = 1e-8;

fn check_radii(r1: f64, r2: f64) -> Result<(), PathIntError> {
    if !(r1 > 0.0 && r2 > 0.0 && r1.is_finite() && r2.is_finite()) {
        return Err(PathIntError::Domain(format!(
            "Green's functions need r1, r2 > 0 (got {r1}, {r2})"
        )));
    }
    Ok(())
}

/// Closed form at an arbitrary complex frequency and energy.
///
/// Fails with `SpectrumPole` when `Gamma((1+mu)/2 -+ kappa)` is singular and
/// with a branch-cut error when an argument lands on the negative real axis.
pub fn greens_continued(
    model: &ConformalModel,
    omega: Complex64,
    r1: f64,
    r2: f64,
    energy: Complex64,
    side: GreensSide,
) -> Result<Complex64, PathIntError> {
    check_radii(r1, r2)?;
    let s = side.sign();
    let mu = model.mu();
    let hw = model.hbar * omega;
    let kappa = energy / (2.0 * hw);
    let a = Complex64::new(0.5 * (1.0 + mu), 0.0) - s * kappa;
    if a.im.abs() <= 1e-12 * a.norm().max(1.0) && a.re < 0.5 {
        let n = (-a.re).round();
        if (a.re + n).abs() <= 1e-12 * n.max(1.0) {
            return Err(PathIntError::SpectrumPole {
                n: n as u64,
                energy: energy.re,
            });
        }
    }
    let c = model.mass * omega / model.hbar;
    let (big, small) = if r1 >= r2 { (r1, r2) } else { (r2, r1) };
    let w = whittaker_w(s * kappa, 0.5 * mu, s * c * big * big)?;
    let m = whittaker_m(s * kappa, 0.5 * mu, s * c * small * small)?;
    let pref = -s / hw * gamma(a)? * rgamma(Complex64::new(1.0 + mu, 0.0));
    Ok(pref / (r1 * r2).sqrt() * w * m)
}

fn frequency(model: &ConformalModel, kind: KernelKind) -> Result<Complex64, PathIntError> {
    match kind {
        KernelKind::GR => Ok(Complex64::new(model.omega(), 0.0)),
        KernelKind::GS => Ok(Complex64::new(0.0, -model.omega())),
        _ => Err(PathIntError::Domain("greens takes G_R or G_S".into())),
    }
}

/// `G_R` or `G_S` at real energy `E`.
pub fn greens(
    model: &ConformalModel,
    kind: KernelKind,
    r1: f64,
    r2: f64,
    energy: f64,
    side: GreensSide,
) -> Result<KernelValue, PathIntError> {
    let w = frequency(model, kind)?;
    let v = greens_continued(model, w, r1, r2, Complex64::new(energy, 0.0), side)?;
    Ok(KernelValue::finite(kind, v))
}

/// Retarded function at `E + i epsilon` with `epsilon = 1e-8 hbar omega`.
pub fn greens_regularized(
    model: &ConformalModel,
    kind: KernelKind,
    r1: f64,
    r2: f64,
    energy: f64,
) -> Result<KernelValue, PathIntError> {
    let w = frequency(model, kind)?;
    let e = Complex64::new(energy, REGULARIZATION * model.hbar * model.omega());
    let v = greens_continued(model, w, r1, r2, e, GreensSide::Retarded)?;
    Ok(KernelValue::finite(kind, v))
}

/// `1/G_R` (retarded, real `E`), finite through the levels.
pub fn inverse_greens(model: &ConformalModel, r1: f64, r2: f64, energy: f64) -> Result<f64, PathIntError> {
    check_radii(r1, r2)?;
    let mu = model.mu();
    let hw = model.hbar * model.omega();
    let kappa = Complex64::new(energy / (2.0 * hw), 0.0);
    let c = Complex64::new(model.mass * model.omega() / model.hbar, 0.0);
    let (big, small) = if r1 >= r2 { (r1, r2) } else { (r2, r1) };
    let w = whittaker_w(kappa, 0.5 * mu, c * big * big)?;
    let m = whittaker_m(kappa, 0.5 * mu, c * small * small)?;
    let a = Complex64::new(0.5 * (1.0 + mu), 0.0) - kappa;
    let g1 = gamma(Complex64::new(1.0 + mu, 0.0))?;
    Ok((-hw * g1 * rgamma(a) * (r1 * r2).sqrt() / (w * m)).re)
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct PoleScan {
    pub poles: Vec<f64>,
    pub radius: f64,
    pub grid_points: usize,
    pub rejected: usize,
}

/// Locates the poles of `G_R(r, r; E)` in `[e_lo, e_hi]` as sign changes of
/// `1/G_R` at `r = 0.25 sqrt(hbar/(M omega))`, refined by bisection. Crossings
/// where `|1/G|` grows instead of vanishing are zeros of `G` and are dropped.
pub fn pole_scan(model: &ConformalModel, e_lo: f64, e_hi: f64, step: f64) -> Result<PoleScan, PathIntError> {
    if !(e_hi > e_lo && step > 0.0) {
        return Err(PathIntError::Domain("pole scan needs e_lo < e_hi and step > 0".into()));
    }
    let r = 0.25 * model.length_scale();
    let f = |e: f64| inverse_greens(model, r, r, e);
    let n = ((e_hi - e_lo) / step).ceil() as usize;
    let mut grid = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let e = (e_lo + k as f64 * step).min(e_hi);
        grid.push((e, f(e)?));
    }
    let mut mags: Vec<f64> = grid.iter().map(|p| p.1.abs()).filter(|v| v.is_finite()).collect();
    if mags.is_empty() {
        return Err(PathIntError::Scan("no finite samples".into()));
    }
    mags.sort_by(|a, b| a.total_cmp(b));
    let typical = mags[mags.len() / 2];
    let mut poles = Vec::new();
    let mut rejected = 0;
    for pair in grid.windows(2) {
        let ((mut a, mut fa), (mut b, fb)) = (pair[0], pair[1]);
        if fa == 0.0 {
            poles.push(a);
            continue;
        }
        if fa * fb >= 0.0 {
            continue;
        }
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            let fm = f(mid)?;
            if fm == 0.0 {
                a = mid;
                b = mid;
                break;
            }
            if fa * fm < 0.0 {
                b = mid;
            } else {
                a = mid;
                fa = fm;
            }
        }
        let root = 0.5 * (a + b);
        if f(root)?.abs() <= 1e-6 * typical {
            poles.push(root);
        } else {
            rejected += 1;
        }
    }
    Ok(PoleScan {
        poles,
        radius: r,
        grid_points: grid.len(),
        rejected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::SpecFunError;
    use approx::assert_relative_eq;

    fn model(g: f64, alpha: f64) -> ConformalModel {
        ConformalModel::new(g, alpha).unwrap()
    }

    fn level(m: &ConformalModel, n: usize) -> f64 {
        m.hbar * m.omega() * (2.0 * n as f64 + m.mu() + 1.0)
    }

    #[test]
    fn poles_at_the_levels() {
        let m = model(1.0, 1.0);
        let scan = pole_scan(&m, 1.0, level(&m, 5) + 1.0, 0.05).unwrap();
        assert_eq!(scan.poles.len(), 6, "{scan:?}");
        for (n, e) in scan.poles.iter().enumerate() {
            assert_relative_eq!(*e, level(&m, n), max_relative = 1e-6);
        }
        assert!(matches!(
            greens(&m, KernelKind::GR, 0.5, 0.7, level(&m, 2), GreensSide::Retarded),
            Err(PathIntError::SpectrumPole { n: 2, .. })
        ));
    }

    #[test]
    fn symmetric_in_endpoints() {
        let m = model(1.3, 0.9);
        for kind in [KernelKind::GR, KernelKind::GS] {
            for side in [GreensSide::Retarded, GreensSide::Advanced] {
                if kind == KernelKind::GR && side == GreensSide::Advanced {
                    continue;
                }
                let a = greens(&m, kind, 0.4, 1.9, 2.7, side).unwrap().value;
                let b = greens(&m, kind, 1.9, 0.4, 2.7, side).unwrap().value;
                assert!((a - b).norm() <= 1e-14 * a.norm());
            }
        }
    }

    #[test]
    fn advanced_elliptic_branch_hits_the_cut() {
        let m = model(1.0, 1.0);
        let r = greens(&m, KernelKind::GR, 0.5, 0.7, 2.0, GreensSide::Advanced);
        assert!(
            matches!(r, Err(PathIntError::SpecFun(SpecFunError::BranchCut { .. }))),
            "{r:?}"
        );
    }

    fn residual(m: &ConformalModel, kind: KernelKind, r1: f64, r2: f64, e: f64) -> f64 {
        // (E - H) G in r2 by a sixth-order stencil; H carries the R or S potential
        let g = |r: f64| greens(m, kind, r1, r, e, GreensSide::Retarded).unwrap().value;
        let h = 2e-3;
        let d2 = (2.0 * (g(r2 + 3.0 * h) + g(r2 - 3.0 * h)) - 27.0 * (g(r2 + 2.0 * h) + g(r2 - 2.0 * h))
            + 270.0 * (g(r2 + h) + g(r2 - h))
            - 490.0 * g(r2))
            / (180.0 * h * h);
        let sign = if kind == KernelKind::GR { 1.0 } else { -1.0 };
        let w = m.omega();
        let v = m.hbar * m.hbar * m.g / (2.0 * m.mass * r2 * r2) + sign * 0.5 * m.mass * w * w * r2 * r2;
        let lhs = m.hbar * m.hbar / (2.0 * m.mass) * d2 + (e - v) * g(r2);
        lhs.norm() / (e * g(r2)).norm()
    }

    #[test]
    fn homogeneous_equation_away_from_source() {
        let m = model(1.0, 1.0);
        for &(r1, r2, e) in &[(0.5, 1.2, 2.7), (1.5, 0.6, 4.1), (0.8, 2.0, 7.3)] {
            assert!(residual(&m, KernelKind::GR, r1, r2, e) <= 1e-6);
            assert!(residual(&m, KernelKind::GS, r1, r2, e) <= 1e-6);
        }
    }

    #[test]
    fn derivative_jump_is_the_source_strength() {
        // (E - H) G = delta requires G'(r1+) - G'(r1-) = 2M/hbar^2
        let m = ConformalModel::with_units(1.0, 1.0, 1.7, 0.6).unwrap();
        let r1 = 0.9;
        let g = |r: f64| {
            greens(&m, KernelKind::GR, r1, r, 3.3, GreensSide::Retarded)
                .unwrap()
                .value
                .re
        };
        let h = 1e-4;
        let right = (-3.0 * g(r1) + 4.0 * g(r1 + h) - g(r1 + 2.0 * h)) / (2.0 * h);
        let left = (3.0 * g(r1) - 4.0 * g(r1 - h) + g(r1 - 2.0 * h)) / (2.0 * h);
        assert_relative_eq!(right - left, 2.0 * m.mass / (m.hbar * m.hbar), max_relative = 1e-6);
    }

    #[test]
    fn regularized_value_has_retarded_sign_near_a_level() {
        let m = model(1.0, 1.0);
        let e0 = level(&m, 0);
        let v = greens_regularized(&m, KernelKind::GR, 0.6, 0.6, e0).unwrap().value;
        assert!(v.im < 0.0 && v.im.abs() > 1e3 * v.re.abs(), "{v}");
        let off = greens_regularized(&m, KernelKind::GR, 0.6, 0.6, e0 + 0.5)
            .unwrap()
            .value;
        let plain = greens(&m, KernelKind::GR, 0.6, 0.6, e0 + 0.5, GreensSide::Retarded)
            .unwrap()
            .value;
        assert!((off - plain).norm() < 1e-6 * plain.norm());
    }
}
