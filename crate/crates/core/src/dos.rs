//! Density of states of the hyperbolic operator S.
//!
//! S is not trace class, so every route carries an explicit regularization:
//! a constant `C` (digamma and series routes) or a box length `L`
//! (Thomas–Fermi). With `eta = E/(hbar omega)` and `zeta = eta + i mu`:
//!
//! ```text
//! digamma   rho = -(1/(2 pi hbar w)) (Re psi((mu + 1 - i eta)/2) - C)
//! TF        rho = (1/(pi hbar w)) ln(sqrt(2M/|E|) w L)
//! poles     drho = (1/(2 hbar w)) Im 1/(e^{pi zeta} + 1)
//! ```

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::algebra::ConformalModel;
use crate::quad::{self, QuadError};
use crate::specfun::{digamma, SpecFunError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DosError {
    #[error("classically allowed region is empty for E = {energy}, L = {length}")]
    EmptyRegion { energy: f64, length: f64 },
    #[error("invalid input: {0}")]
    Domain(String),
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DosMethod {
    Series,
    Digamma,
    ThomasFermi,
    ThomasFermiBox,
    PoleClosed,
    GutzwillerSeries,
    SpectralStaircase,
}

impl DosMethod {
    pub fn label(self) -> &'static str {
        match self {
            DosMethod::Series => "series",
            DosMethod::Digamma => "digamma",
            DosMethod::ThomasFermi => "thomas_fermi",
            DosMethod::ThomasFermiBox => "thomas_fermi_box",
            DosMethod::PoleClosed => "pole_closed",
            DosMethod::GutzwillerSeries => "gutzwiller_series",
            DosMethod::SpectralStaircase => "spectral_staircase",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct DosEstimate {
    pub energy: f64,
    pub rho: f64,
    pub method: DosMethod,
    /// regularization constant, when the route uses one
    pub c: Option<f64>,
    /// box length, when the route uses one
    pub l: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum SemiclassicalForm {
    PoleClosed,
    GutzwillerSeries,
}

/// Maslov index of the primitive orbit.
pub const MASLOV_INDEX: u32 = 2;
/// Weight of the one-sided (half-line) problem.
pub const ONE_SIDED_FACTOR: f64 = 0.5;
/// `|det(M - 1)|^{-1/2}` for the one-dimensional orbit.
pub const MONODROMY_WEIGHT: f64 = 1.0;

fn hw(model: &ConformalModel) -> f64 {
    model.hbar * model.omega()
}

/// Cutoff identification `C_L = ln(M omega L^2 / hbar)`.
pub fn cutoff_constant(model: &ConformalModel, length: f64) -> f64 {
    (model.mass * model.omega() * length * length / model.hbar).ln()
}

fn half_index(model: &ConformalModel, eta: f64) -> Complex64 {
    Complex64::new(0.5 * (model.mu() + 1.0), -0.5 * eta)
}

pub fn dos_digamma(model: &ConformalModel, energy: f64, c: f64) -> Result<DosEstimate, DosError> {
    let eta = energy / hw(model);
    let psi = digamma(half_index(model, eta))?;
    Ok(DosEstimate {
        energy,
        rho: -(psi.re - c) / (2.0 * PI * hw(model)),
        method: DosMethod::Digamma,
        c: Some(c),
        l: None,
    })
}

fn check_tf(energy: f64, length: f64) -> Result<(), DosError> {
    if energy == 0.0 || !energy.is_finite() {
        return Err(DosError::Domain(format!(
            "Thomas–Fermi density needs E != 0, got {energy}"
        )));
    }
    if !(length > 0.0 && length.is_finite()) {
        return Err(DosError::Domain(format!("box length must be positive, got {length}")));
    }
    Ok(())
}

pub fn dos_thomas_fermi(model: &ConformalModel, energy: f64, length: f64) -> Result<DosEstimate, DosError> {
    check_tf(energy, length)?;
    let arg = (2.0 * model.mass / energy.abs()).sqrt() * model.omega() * length;
    if arg <= 1.0 {
        return Err(DosError::EmptyRegion { energy, length });
    }
    Ok(DosEstimate {
        energy,
        rho: arg.ln() / (PI * hw(model)),
        method: DosMethod::ThomasFermi,
        c: None,
        l: Some(length),
    })
}

/// Phase-space average `(1/(pi hbar)) int M/p dq` for `V_S` truncated at `q = L`.
pub fn dos_thomas_fermi_box(model: &ConformalModel, energy: f64, length: f64) -> Result<DosEstimate, DosError> {
    check_tf(energy, length)?;
    let w = model.omega();
    let b = model.hbar * model.hbar * model.g / (2.0 * model.mass);
    let k = model.mass * w * w;
    // E = b/x - k x/2 in x = q^2
    let root = (energy * energy + 2.0 * k * b).sqrt();
    let x_turn = if energy >= 0.0 {
        2.0 * b / (energy + root)
    } else {
        (root - energy) / k
    };
    let q_turn = x_turn.sqrt();
    if q_turn >= length {
        return Err(DosError::EmptyRegion { energy, length });
    }
    let f = |q: f64| {
        let kin = 2.0 * model.mass * (energy - b / (q * q) + 0.5 * k * q * q);
        if kin <= 0.0 {
            0.0
        } else {
            model.mass / kin.sqrt()
        }
    };
    let integral = quad::tanh_sinh(f, q_turn, length, 1e-12)?;
    Ok(DosEstimate {
        energy,
        rho: integral / (PI * model.hbar),
        method: DosMethod::ThomasFermiBox,
        c: None,
        l: Some(length),
    })
}

/// Oscillating correction from the poles, either closed or as the truncated
/// repetition sum over `k_max` traversals; `average_box` adds the
/// Thomas–Fermi average for that box length.
pub fn dos_semiclassical(
    model: &ConformalModel,
    energy: f64,
    form: SemiclassicalForm,
    k_max: usize,
    average_box: Option<f64>,
) -> Result<DosEstimate, DosError> {
    let eta = energy.abs() / hw(model);
    let mu = model.mu();
    let delta = match form {
        SemiclassicalForm::PoleClosed => {
            let zeta = Complex64::new(eta, mu);
            let e = (-PI * zeta).exp();
            (e / (1.0 + e)).im / (2.0 * hw(model))
        }
        SemiclassicalForm::GutzwillerSeries => {
            if k_max == 0 {
                return Err(DosError::Domain("k_max must be at least 1".into()));
            }
            let period = PI * model.alpha;
            let maslov = Complex64::new(0.0, -PI * MASLOV_INDEX as f64 / 2.0).exp();
            let step = maslov * Complex64::new(-PI * eta, -PI * mu).exp();
            let mut term = Complex64::new(1.0, 0.0);
            let mut sum = Complex64::new(0.0, 0.0);
            for _ in 0..k_max {
                term *= step;
                sum += term;
            }
            -ONE_SIDED_FACTOR * MONODROMY_WEIGHT * period / (PI * model.hbar) * sum.im
        }
    };
    let method = match form {
        SemiclassicalForm::PoleClosed => DosMethod::PoleClosed,
        SemiclassicalForm::GutzwillerSeries => DosMethod::GutzwillerSeries,
    };
    let (rho, l) = match average_box {
        Some(length) => (delta + dos_thomas_fermi(model, energy, length)?.rho, Some(length)),
        None => (delta, None),
    };
    Ok(DosEstimate {
        energy,
        rho,
        method,
        c: None,
        l,
    })
}

/// Partial pole sum `(1/(2 pi hbar w)) Re sum_{n < n_max} 1/(n + z)` with
/// `z = (mu + 1 - i eta)/2`. With `subtract` the divergent counterterm
/// `1/(n + 1)` is removed term by term and `C` added; the result converges to
/// `dos_digamma(E, C - gamma_E)`.
pub fn dos_series(
    model: &ConformalModel,
    energy: f64,
    n_max: usize,
    c: f64,
    subtract: bool,
) -> Result<DosEstimate, DosError> {
    if n_max == 0 {
        return Err(DosError::Domain("n_max must be at least 1".into()));
    }
    if !subtract {
        log::warn!("unsubtracted pole series diverges like ln(n_max)/(2 pi hbar omega)");
    }
    let z = half_index(model, energy / hw(model));
    let mut acc = 0.0;
    // summed from the small tail terms upward
    for n in (0..n_max).rev() {
        let nf = n as f64;
        let term = (1.0 / (z + nf)).re;
        acc += if subtract { term - 1.0 / (nf + 1.0) } else { term };
    }
    let rho = (acc + if subtract { c } else { 0.0 }) / (2.0 * PI * hw(model));
    Ok(DosEstimate {
        energy,
        rho,
        method: DosMethod::Series,
        c: subtract.then_some(c),
        l: None,
    })
}
