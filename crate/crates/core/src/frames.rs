//! Effective-time maps, field/momentum maps and radial conformal Killing flows
//! on the causal diamond `|t| + r < alpha`.

use thiserror::Error;

use crate::algebra::GeneratorCoeffs;
use crate::ode::{self, Control, OdeError, Tolerances};
use crate::quad;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FramesError {
    #[error("f(t) = u + v t + w t^2 vanishes at t = {t}: horizon reached")]
    Horizon { t: f64 },
    #[error("no closed-form inverse for coefficients ({u}, {v}, {w})")]
    Unsupported { u: f64, v: f64, w: f64 },
    #[error("flow integration failed: {0}")]
    Flow(#[from] OdeError),
    #[error("effective-time quadrature failed: {0}")]
    Quadrature(#[from] quad::QuadError),
    #[error("invalid diamond size alpha = {0}")]
    InvalidAlpha(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct DiamondGeometry {
    pub alpha: f64,
}

impl DiamondGeometry {
    pub fn new(alpha: f64) -> Result<Self, FramesError> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(FramesError::InvalidAlpha(alpha));
        }
        Ok(DiamondGeometry { alpha })
    }

    /// `alpha - |t| - |r|`; positive strictly inside the diamond.
    pub fn boundary_gap(&self, e: &SpacetimeEvent) -> f64 {
        self.alpha - e.t.abs() - e.r.abs()
    }

    pub fn contains(&self, e: &SpacetimeEvent) -> bool {
        self.boundary_gap(e) > 0.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct SpacetimeEvent {
    pub t: f64,
    pub r: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KillingField {
    RK,
    SK,
    DK,
}

/// Roots of `f` lying in the closed interval between `0` and `t`.
fn root_on_path(c: &GeneratorCoeffs, t: f64) -> Option<f64> {
    let (lo, hi) = if t >= 0.0 { (0.0, t) } else { (t, 0.0) };
    let inside = |x: f64| x >= lo && x <= hi;
    if c.w == 0.0 {
        if c.v == 0.0 {
            return None;
        }
        let x = -c.u / c.v;
        return inside(x).then_some(x);
    }
    let disc = c.v * c.v - 4.0 * c.u * c.w;
    if disc < 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    // numerically stable quadratic roots
    let sgn = if c.v >= 0.0 { 1.0 } else { -1.0 };
    let qq = -0.5 * (c.v + sgn * sq);
    let mut roots = vec![];
    if qq != 0.0 {
        roots.push(qq / c.w);
        roots.push(c.u / qq);
    } else {
        roots.push(0.0);
    }
    roots
        .into_iter()
        .filter(|&x| inside(x))
        .min_by(|a, b| a.abs().total_cmp(&b.abs()))
}

/// Effective time `tau(t) = int_0^t ds / f(s)`.
pub fn tau_of_t(c: &GeneratorCoeffs, t: f64) -> Result<f64, FramesError> {
    if let Some(x) = root_on_path(c, t) {
        return Err(FramesError::Horizon { t: x });
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    if c.v == 0.0 && c.u > 0.0 {
        if c.w == 0.0 {
            return Ok(t / c.u);
        }
        let k = (c.w.abs() / c.u).sqrt();
        return Ok(if c.w < 0.0 {
            (k * t).atanh() / (c.u * k)
        } else {
            (k * t).atan() / (c.u * k)
        });
    }
    let sign = t.signum();
    let v = quad::tanh_sinh(|s| 1.0 / c.f(sign * s), 0.0, t.abs(), 1e-13)?;
    Ok(sign * v)
}

/// Inverse of [`tau_of_t`] for `v = 0`, `u > 0` (the S- and R-type generators).
pub fn t_of_tau(c: &GeneratorCoeffs, tau: f64) -> Result<f64, FramesError> {
    if !(c.v == 0.0 && c.u > 0.0) {
        return Err(FramesError::Unsupported { u: c.u, v: c.v, w: c.w });
    }
    if c.w == 0.0 {
        return Ok(c.u * tau);
    }
    let k = (c.w.abs() / c.u).sqrt();
    let x = c.u * k * tau;
    if c.w < 0.0 {
        return Ok(x.tanh() / k);
    }
    if x.abs() >= std::f64::consts::FRAC_PI_2 {
        return Err(FramesError::Horizon {
            t: x.signum() * f64::INFINITY,
        });
    }
    Ok(x.tan() / k)
}

fn f_checked(c: &GeneratorCoeffs, t: f64) -> Result<f64, FramesError> {
    let f = c.f(t);
    if f == 0.0 {
        return Err(FramesError::Horizon { t });
    }
    Ok(f)
}

/// Field map `q = Q / |f(t)|^{1/2}`.
pub fn q_of_big_q(c: &GeneratorCoeffs, big_q: f64, t: f64) -> Result<f64, FramesError> {
    Ok(big_q / f_checked(c, t)?.abs().sqrt())
}

/// Momentum map `p = sgn(f) |f|^{1/2} (P - M f'/(2f) Q)`.
pub fn p_of_big_p(c: &GeneratorCoeffs, big_q: f64, big_p: f64, t: f64, mass: f64) -> Result<f64, FramesError> {
    let f = f_checked(c, t)?;
    Ok(f.signum() * f.abs().sqrt() * (big_p - mass * c.f_dot(t) / (2.0 * f) * big_q))
}

/// Killing-field velocity `(dt/ds, dr/ds)`.
pub fn rckf_velocity(e: &SpacetimeEvent, geometry: &DiamondGeometry, which: KillingField) -> (f64, f64) {
    let a = geometry.alpha;
    let (t, r) = (e.t, e.r);
    match which {
        KillingField::SK => ((a * a - t * t - r * r) / (2.0 * a), -t * r / a),
        KillingField::RK => ((a * a + t * t + r * r) / (2.0 * a), t * r / a),
        KillingField::DK => (t, r),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct FlowSample {
    pub s: f64,
    pub t: f64,
    pub r: f64,
}

/// Integral curve of a Killing field from `e0` over `s in [0, s_max]`,
/// sampled at every accepted step.
pub fn rckf_flow(
    e0: &SpacetimeEvent,
    geometry: &DiamondGeometry,
    which: KillingField,
    s_max: f64,
    tol: f64,
) -> Result<Vec<FlowSample>, FramesError> {
    let mut out = Vec::new();
    let g = *geometry;
    let rhs = move |_s: f64, y: &[f64; 2]| {
        let (dt, dr) = rckf_velocity(&SpacetimeEvent { t: y[0], r: y[1] }, &g, which);
        [dt, dr]
    };
    let tols = Tolerances::new(tol, tol * 1e-3 * geometry.alpha);
    ode::integrate(rhs, 0.0, [e0.t, e0.r], s_max, &tols, |s, y| {
        out.push(FlowSample { s, t: y[0], r: y[1] });
        Control::Continue
    })?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{cartan_weyl, ConformalModel};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn s_gen(alpha: f64) -> GeneratorCoeffs {
        cartan_weyl(&ConformalModel::new(1.0, alpha).unwrap()).1
    }

    fn r_gen(alpha: f64) -> GeneratorCoeffs {
        cartan_weyl(&ConformalModel::new(1.0, alpha).unwrap()).0
    }

    #[test]
    fn tau_examples() {
        assert_eq!(tau_of_t(&s_gen(3.0), 0.0).unwrap(), 0.0);
        let tau = tau_of_t(&s_gen(2.0), 1.0).unwrap();
        assert_relative_eq!(tau, 2.0 * 0.5f64.atanh(), epsilon = 1e-15);
        assert_relative_eq!(tau, 1.098_612_288_668_11, epsilon = 1e-13);
        assert!(matches!(tau_of_t(&s_gen(1.0), 1.0), Err(FramesError::Horizon { .. })));
        assert!(tau_of_t(&s_gen(1.0), 1.0 - 1e-12).unwrap() > 13.0);
        assert_relative_eq!(
            t_of_tau(&s_gen(2.0), 1.098_612_288_668_11).unwrap(),
            1.0,
            epsilon = 1e-13
        );
        assert_relative_eq!(t_of_tau(&s_gen(2.0), 1e3).unwrap(), 2.0);
        assert_relative_eq!(t_of_tau(&s_gen(2.0), -1e3).unwrap(), -2.0);
        assert_relative_eq!(
            tau_of_t(&r_gen(2.0), 1.5).unwrap(),
            2.0 * 0.75f64.atan(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn generic_coefficients_use_quadrature() {
        // u = 1, v = 1, w = 0: tau = ln(1 + t)
        let c = GeneratorCoeffs::new(1.0, 1.0, 0.0).unwrap();
        assert_relative_eq!(tau_of_t(&c, 2.0).unwrap(), 3f64.ln(), max_relative = 1e-12);
        assert_relative_eq!(tau_of_t(&c, -0.5).unwrap(), 0.5f64.ln(), max_relative = 1e-12);
        assert!(matches!(tau_of_t(&c, -1.5), Err(FramesError::Horizon { .. })));
        assert!(matches!(t_of_tau(&c, 1.0), Err(FramesError::Unsupported { .. })));
        // closed form of the S generator agrees with quadrature of 1/f
        let s = s_gen(2.0);
        let q = quad::tanh_sinh(|x| 1.0 / s.f(x), 0.0, 1.0, 1e-14).unwrap();
        assert_relative_eq!(q, tau_of_t(&s, 1.0).unwrap(), max_relative = 1e-13);
    }

    #[test]
    fn field_maps() {
        let c = GeneratorCoeffs::new(1.0, 0.7, 0.0).unwrap();
        assert_eq!(q_of_big_q(&c, 2.0, 0.0).unwrap(), 2.0);
        assert_relative_eq!(p_of_big_p(&c, 2.0, 3.0, 0.0, 1.0).unwrap(), 3.0 - 0.7);
        assert_relative_eq!(
            q_of_big_q(&s_gen(2.0), 3.0, 1.0).unwrap(),
            3.0 / 0.75f64.sqrt(),
            epsilon = 1e-15
        );
        assert_relative_eq!(q_of_big_q(&r_gen(1e8), 3.0, 5.0).unwrap(), 3.0, max_relative = 1e-14);
        assert!(q_of_big_q(&s_gen(1.0), 1.0, 1.0).is_err());
    }

    #[test]
    fn velocity_examples() {
        let g = DiamondGeometry::new(2.0).unwrap();
        let at = |t, r| SpacetimeEvent { t, r };
        assert_eq!(rckf_velocity(&at(0.0, 0.0), &g, KillingField::SK), (1.0, 0.0));
        let v = rckf_velocity(&at(0.0, 2.0), &g, KillingField::SK);
        assert_eq!(v.0, 0.0);
        assert_eq!(v.1, 0.0);
        assert_eq!(rckf_velocity(&at(1.0, 2.0), &g, KillingField::DK), (1.0, 2.0));
    }

    #[test]
    fn flows() {
        let g = DiamondGeometry::new(2.0).unwrap();
        let curve = rckf_flow(&SpacetimeEvent { t: 0.0, r: 0.5 }, &g, KillingField::SK, 10.0, 1e-10).unwrap();
        assert!(curve.iter().all(|p| p.t.abs() + p.r < 2.0 && p.r >= 0.0));
        let ray = rckf_flow(&SpacetimeEvent { t: 1.0, r: 1.0 }, &g, KillingField::DK, 2.0, 1e-12).unwrap();
        let last = ray.last().unwrap();
        assert_relative_eq!(last.t, 2f64.exp(), max_relative = 1e-9);
        assert_relative_eq!(last.r, 2f64.exp(), max_relative = 1e-9);
        let rk = rckf_flow(&SpacetimeEvent { t: 0.0, r: 0.5 }, &g, KillingField::RK, 1.0, 1e-10).unwrap();
        assert!(rk.windows(2).all(|w| w[1].t > w[0].t));
    }

    #[test]
    fn large_alpha_limit() {
        let alpha = 1e3;
        let t = 0.1 * alpha;
        let tau = tau_of_t(&s_gen(alpha), t).unwrap();
        let bound = t.powi(3) / (2.0 * alpha * alpha);
        // atanh(x) - x = x^3/3 + ...; bound has headroom factor 3/2
        assert!((tau - t).abs() <= bound * 1.01);
    }

    proptest! {
        #[test]
        fn tau_round_trip(alpha in 0.1f64..10.0, x in -0.999f64..0.999) {
            let s = s_gen(alpha);
            let t = x * alpha;
            let back = t_of_tau(&s, tau_of_t(&s, t).unwrap()).unwrap();
            prop_assert!((back - t).abs() <= 1e-12 * alpha);
        }

        #[test]
        fn s_map_is_monotone(alpha in 0.1f64..10.0, x in -0.99f64..0.99) {
            // d tau/dt = 1/(1 - t^2/alpha^2) >= 1
            let s = s_gen(alpha);
            let t = x * alpha;
            let h = 1e-6 * alpha;
            let d = (tau_of_t(&s, t + h).unwrap() - tau_of_t(&s, t - h).unwrap()) / (2.0 * h);
            prop_assert!(d >= 1.0 - 1e-8);
            prop_assert!((d - 1.0 / (1.0 - x * x)).abs() < 1e-6 / (1.0 - x * x).powi(2));
        }
    }
}
