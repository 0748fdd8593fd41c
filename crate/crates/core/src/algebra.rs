//! sl(2,R) generator layer.
//!
//! A generator is `G = u H + v D + w K` with the classical phase-space
//! functions
//!
//! ```text
//! H = P^2/(2M) + hbar^2 g/(2 M Q^2)
//! D = t H - Q P / 2
//! K = t^2 H - t Q P + M Q^2 / 2
//! ```
//!
//! classified by the discriminant `v^2 - 4 u w`. The rescaled pair
//! `R = H + K/alpha^2` (elliptic) and `S = H - K/alpha^2` (hyperbolic)
//! drive the diamond dynamics.

use num_complex::Complex64;
use thiserror::Error;

/// Absolute tolerance below which the discriminant counts as zero.
pub const DISCRIMINANT_ZERO_TOL: f64 = 1e-14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("generator coefficients must be finite and not all zero: ({u}, {v}, {w})")]
    InvalidCoeffs { u: f64, v: f64, w: f64 },
    #[error("invalid model parameter {name} = {value}")]
    InvalidModel { name: &'static str, value: f64 },
    #[error("generator is singular at Q = 0")]
    SingularOrigin,
    #[error("finite-difference step {h} is degenerate at Q = {q}, P = {p}")]
    StepDegeneracy { h: f64, q: f64, p: f64 },
}

/// Physical parameters of the half-line conformal model.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct ConformalModel {
    pub g: f64,
    pub alpha: f64,
    pub mass: f64,
    pub hbar: f64,
}

impl ConformalModel {
    /// Model with `mass = hbar = 1`.
    pub fn new(g: f64, alpha: f64) -> Result<Self, AlgebraError> {
        Self::with_units(g, alpha, 1.0, 1.0)
    }

    pub fn with_units(g: f64, alpha: f64, mass: f64, hbar: f64) -> Result<Self, AlgebraError> {
        for (name, value) in [("g", g), ("alpha", alpha), ("mass", mass), ("hbar", hbar)] {
            if !(value.is_finite() && value > 0.0) {
                return Err(AlgebraError::InvalidModel { name, value });
            }
        }
        Ok(ConformalModel { g, alpha, mass, hbar })
    }

    /// Conformal index `sqrt(g + 1/4)`.
    pub fn mu(&self) -> f64 {
        (self.g + 0.25).sqrt()
    }

    /// `1/alpha`.
    pub fn omega(&self) -> f64 {
        1.0 / self.alpha
    }

    /// Oscillator length `sqrt(hbar/(M omega))`.
    pub fn length_scale(&self) -> f64 {
        (self.hbar / (self.mass * self.omega())).sqrt()
    }

    /// The model with its real frequency, ready for continuation.
    pub fn continued(&self) -> ContinuedModel {
        ContinuedModel {
            model: *self,
            omega: Complex64::new(self.omega(), 0.0),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct GeneratorCoeffs {
    pub u: f64,
    pub v: f64,
    pub w: f64,
}

impl GeneratorCoeffs {
    pub const H: GeneratorCoeffs = GeneratorCoeffs { u: 1.0, v: 0.0, w: 0.0 };
    pub const D: GeneratorCoeffs = GeneratorCoeffs { u: 0.0, v: 1.0, w: 0.0 };
    pub const K: GeneratorCoeffs = GeneratorCoeffs { u: 0.0, v: 0.0, w: 1.0 };

    pub fn new(u: f64, v: f64, w: f64) -> Result<Self, AlgebraError> {
        let ok = u.is_finite() && v.is_finite() && w.is_finite() && (u, v, w) != (0.0, 0.0, 0.0);
        let disc = v * v - 4.0 * u * w;
        if !ok || !disc.is_finite() {
            return Err(AlgebraError::InvalidCoeffs { u, v, w });
        }
        Ok(GeneratorCoeffs { u, v, w })
    }

    pub fn discriminant(&self) -> f64 {
        self.v * self.v - 4.0 * self.u * self.w
    }

    /// `f(t) = u + v t + w t^2`.
    pub fn f(&self, t: f64) -> f64 {
        self.u + t * (self.v + t * self.w)
    }

    /// `f'(t) = v + 2 w t`.
    pub fn f_dot(&self, t: f64) -> f64 {
        self.v + 2.0 * self.w * t
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GeneratorClass {
    Elliptic,
    Parabolic,
    Hyperbolic,
}

impl std::fmt::Display for GeneratorClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            GeneratorClass::Elliptic => "elliptic",
            GeneratorClass::Parabolic => "parabolic",
            GeneratorClass::Hyperbolic => "hyperbolic",
        };
        f.write_str(s)
    }
}

pub fn classify(c: &GeneratorCoeffs) -> GeneratorClass {
    let d = c.discriminant();
    if d.abs() <= DISCRIMINANT_ZERO_TOL {
        GeneratorClass::Parabolic
    } else if d < 0.0 {
        GeneratorClass::Elliptic
    } else {
        GeneratorClass::Hyperbolic
    }
}

/// Classical phase-space point at time `t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhasePoint {
    pub q: f64,
    pub p: f64,
    pub t: f64,
}

fn hkd(model: &ConformalModel, x: &PhasePoint) -> (f64, f64, f64) {
    let m = model.mass;
    let h = x.p * x.p / (2.0 * m) + model.hbar * model.hbar * model.g / (2.0 * m * x.q * x.q);
    let d = x.t * h - 0.5 * x.q * x.p;
    let k = x.t * x.t * h - x.t * x.q * x.p + 0.5 * m * x.q * x.q;
    (h, d, k)
}

/// `u H + v D + w K` at a phase-space point.
pub fn generator_value(c: &GeneratorCoeffs, x: &PhasePoint, model: &ConformalModel) -> Result<f64, AlgebraError> {
    if x.q == 0.0 {
        return Err(AlgebraError::SingularOrigin);
    }
    let (h, d, k) = hkd(model, x);
    Ok(c.u * h + c.v * d + c.w * k)
}

/// Central-difference Poisson bracket `{G_a, G_b}` at fixed `t`.
pub fn poisson_bracket(
    a: &GeneratorCoeffs,
    b: &GeneratorCoeffs,
    x: &PhasePoint,
    model: &ConformalModel,
    h: f64,
) -> Result<f64, AlgebraError> {
    if x.q == 0.0 {
        return Err(AlgebraError::SingularOrigin);
    }
    if !(h > 0.0) || x.q + h == x.q || x.p + h == x.p || (x.q - h) * x.q <= 0.0 {
        return Err(AlgebraError::StepDegeneracy { h, q: x.q, p: x.p });
    }
    let at = |c: &GeneratorCoeffs, dq: f64, dp: f64| {
        generator_value(
            c,
            &PhasePoint {
                q: x.q + dq,
                p: x.p + dp,
                t: x.t,
            },
            model,
        )
    };
    let dq = |c: &GeneratorCoeffs| -> Result<f64, AlgebraError> { Ok((at(c, h, 0.0)? - at(c, -h, 0.0)?) / (2.0 * h)) };
    let dp = |c: &GeneratorCoeffs| -> Result<f64, AlgebraError> { Ok((at(c, 0.0, h)? - at(c, 0.0, -h)?) / (2.0 * h)) };
    Ok(dq(a)? * dp(b)? - dp(a)? * dq(b)?)
}

/// Rescaled Cartan–Weyl pair `(R, S) = (H + K/alpha^2, H - K/alpha^2)`.
pub fn cartan_weyl(model: &ConformalModel) -> (GeneratorCoeffs, GeneratorCoeffs) {
    let w = 1.0 / (model.alpha * model.alpha);
    (
        GeneratorCoeffs { u: 1.0, v: 0.0, w },
        GeneratorCoeffs { u: 1.0, v: 0.0, w: -w },
    )
}

/// A model whose frequency may have been continued into the complex plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContinuedModel {
    pub model: ConformalModel,
    pub omega: Complex64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DualDirection {
    /// `omega -> +i omega`
    SToR,
    /// `omega -> -i omega`
    RToS,
}

/// Continues the frequency `1/alpha -> +-i/alpha`; the geometric `alpha` is kept.
pub fn dual_map(m: &ContinuedModel, direction: DualDirection) -> ContinuedModel {
    let factor = match direction {
        DualDirection::SToR => Complex64::i(),
        DualDirection::RToS => -Complex64::i(),
    };
    ContinuedModel {
        model: m.model,
        omega: m.omega * factor,
    }
}

/// Named generators of a model.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Generator {
    H,
    D,
    K,
    R,
    S,
}

impl Generator {
    pub fn coeffs(self, model: &ConformalModel) -> GeneratorCoeffs {
        let (r, s) = cartan_weyl(model);
        match self {
            Generator::H => GeneratorCoeffs::H,
            Generator::D => GeneratorCoeffs::D,
            Generator::K => GeneratorCoeffs::K,
            Generator::R => r,
            Generator::S => s,
        }
    }
}

/// One bracket relation `{A, B} = sum_k c_k G_k` and its worst residual.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct BracketCheck {
    pub relation: &'static str,
    pub max_residual: f64,
}

/// Checks the six classical bracket relations at the given points:
/// `{D,H} = -H`, `{D,K} = K`, `{H,K} = 2D`, `{D,R} = -S`,
/// `{R,S} = -4D/alpha^2`, `{D,S} = -R`.
pub fn bracket_table(model: &ConformalModel, points: &[PhasePoint], h: f64) -> Result<Vec<BracketCheck>, AlgebraError> {
    use Generator::*;
    let a2 = model.alpha * model.alpha;
    let relations: [(&'static str, Generator, Generator, Vec<(f64, Generator)>); 6] = [
        ("{D,H} = -H", D, H, vec![(-1.0, H)]),
        ("{D,K} = K", D, K, vec![(1.0, K)]),
        ("{H,K} = 2D", H, K, vec![(2.0, D)]),
        ("{D,R} = -S", D, R, vec![(-1.0, S)]),
        ("{R,S} = -4D/alpha^2", R, S, vec![(-4.0 / a2, D)]),
        ("{D,S} = -R", D, S, vec![(-1.0, R)]),
    ];
    let mut out = Vec::with_capacity(relations.len());
    for (name, a, b, rhs) in relations.iter() {
        let mut worst: f64 = 0.0;
        for x in points {
            let lhs = poisson_bracket(&a.coeffs(model), &b.coeffs(model), x, model, h)?;
            let mut want = 0.0;
            for (c, g) in rhs {
                want += c * generator_value(&g.coeffs(model), x, model)?;
            }
            worst = worst.max((lhs - want).abs());
        }
        out.push(BracketCheck {
            relation: name,
            max_residual: worst,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn model(g: f64, alpha: f64) -> ConformalModel {
        ConformalModel::new(g, alpha).unwrap()
    }

    #[test]
    fn classification_examples() {
        let m = model(1.0, 2.0);
        let (r, s) = cartan_weyl(&m);
        assert_eq!(classify(&r), GeneratorClass::Elliptic);
        assert_eq!(classify(&s), GeneratorClass::Hyperbolic);
        assert_eq!(classify(&GeneratorCoeffs::H), GeneratorClass::Parabolic);
        assert_eq!(classify(&GeneratorCoeffs::K), GeneratorClass::Parabolic);
        assert_eq!(classify(&GeneratorCoeffs::D), GeneratorClass::Hyperbolic);
        assert_eq!(
            s,
            GeneratorCoeffs {
                u: 1.0,
                v: 0.0,
                w: -0.25
            }
        );
        let (r1, s1) = cartan_weyl(&model(1.0, 1.0));
        assert_eq!((r1.w, s1.w), (1.0, -1.0));
        assert!(GeneratorCoeffs::new(0.0, 0.0, 0.0).is_err());
        assert!(GeneratorCoeffs::new(f64::NAN, 0.0, 1.0).is_err());
    }

    #[test]
    fn generator_values() {
        let m = model(1.0, 2.0);
        let at = |q, p, t| PhasePoint { q, p, t };
        assert_relative_eq!(
            generator_value(&GeneratorCoeffs::H, &at(1.0, 0.0, 0.0), &m).unwrap(),
            0.5
        );
        assert_relative_eq!(
            generator_value(&GeneratorCoeffs::D, &at(1.0, 2.0, 0.0), &m).unwrap(),
            -1.0
        );
        let (r, _) = cartan_weyl(&m);
        // H = 1/2 + 1/2, K/alpha^2 = (1/2)/4
        assert_relative_eq!(generator_value(&r, &at(1.0, 1.0, 0.0), &m).unwrap(), 1.125);
        assert_eq!(
            generator_value(&r, &at(0.0, 1.0, 0.0), &m),
            Err(AlgebraError::SingularOrigin)
        );
    }

    #[test]
    fn bracket_examples() {
        let m = model(1.0, 2.0);
        let x = PhasePoint { q: 1.0, p: 0.7, t: 0.3 };
        let dh = poisson_bracket(&GeneratorCoeffs::D, &GeneratorCoeffs::H, &x, &m, 1e-5).unwrap();
        assert_relative_eq!(dh, -0.745, epsilon = 1e-9);
        let x0 = PhasePoint { q: 1.0, p: 1.0, t: 0.0 };
        let hk = poisson_bracket(&GeneratorCoeffs::H, &GeneratorCoeffs::K, &x0, &m, 1e-5).unwrap();
        assert_relative_eq!(hk, -1.0, epsilon = 1e-9);
        let aa = poisson_bracket(&GeneratorCoeffs::D, &GeneratorCoeffs::D, &x, &m, 1e-5).unwrap();
        assert_eq!(aa, 0.0);
        assert!(poisson_bracket(&GeneratorCoeffs::D, &GeneratorCoeffs::H, &x, &m, 1e-300).is_err());
    }

    #[test]
    fn dual_map_tags() {
        let m = model(1.0, 2.0).continued();
        let r = dual_map(&m, DualDirection::SToR);
        assert_eq!(r.omega, Complex64::new(0.0, 0.5));
        let back = dual_map(&dual_map(&m, DualDirection::RToS), DualDirection::SToR);
        assert_eq!(back.omega, m.omega);
        assert_eq!(back.model.alpha, 2.0);
    }

    #[test]
    fn bracket_table_with_units() {
        let m = ConformalModel::with_units(1.7, 1.3, 2.5, 0.6).unwrap();
        let pts = [
            PhasePoint {
                q: 0.8,
                p: -0.4,
                t: 0.9,
            },
            PhasePoint {
                q: 2.0,
                p: 1.1,
                t: -0.5,
            },
        ];
        for row in bracket_table(&m, &pts, 1e-5).unwrap() {
            assert!(row.max_residual < 1e-6, "{row:?}");
        }
    }

    proptest! {
        #[test]
        fn classification_is_scale_invariant(u in -5.0f64..5.0, v in -5.0f64..5.0, w in -5.0f64..5.0, s in 0.1f64..10.0) {
            let c = GeneratorCoeffs::new(u, v, w);
            prop_assume!(c.is_ok());
            let c = c.unwrap();
            prop_assume!(c.discriminant().abs() > 1e-6);
            let scaled = GeneratorCoeffs::new(s * u, s * v, s * w).unwrap();
            prop_assert_eq!(classify(&c), classify(&scaled));
        }
    }
}
