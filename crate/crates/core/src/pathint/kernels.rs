use num_complex::Complex64;

use super::{KernelKind, KernelValue, PathIntError};
use crate::algebra::ConformalModel;
use crate::quad;
use crate::specfun::{bessel_i, bessel_i_scaled};

/// `|sin(omega T)|` below this is treated as a caustic.
pub const CAUSTIC_TOL: f64 = 1e-9;

fn check_points(r1: f64, r2: f64, t: f64) -> Result<(), PathIntError> {
    if !(r1 > 0.0 && r2 > 0.0 && t > 0.0 && r1.is_finite() && r2.is_finite() && t.is_finite()) {
        return Err(PathIntError::Domain(format!(
            "kernels need r1, r2, T > 0 (got {r1}, {r2}, {t})"
        )));
    }
    Ok(())
}

/// Real-time elliptic kernel for an arbitrary complex frequency:
///
/// ```text
/// M w/(i hbar sin wT) sqrt(r1 r2) exp[i M w (r1^2 + r2^2) cot(wT) / (2 hbar)]
///     I_mu(M w r1 r2 / (i hbar sin wT))
/// ```
pub fn kernel_r_complex(
    model: &ConformalModel,
    omega: Complex64,
    r1: f64,
    r2: f64,
    t: f64,
) -> Result<Complex64, PathIntError> {
    check_points(r1, r2, t)?;
    let i = Complex64::i();
    let wt = omega * t;
    let s = wt.sin();
    if s.norm() < CAUSTIC_TOL {
        return Err(PathIntError::Caustic { omega_t: wt.re });
    }
    let m_over_h = model.mass / model.hbar;
    let pref = m_over_h * omega / (i * s);
    let expo = i * m_over_h * omega * (r1 * r1 + r2 * r2) * wt.cos() / (2.0 * s);
    let arg = m_over_h * omega * r1 * r2 / (i * s);
    Ok(pref * (r1 * r2).sqrt() * expo.exp() * bessel_i(model.mu(), arg)?)
}

/// Euclidean elliptic kernel for a complex mass:
///
/// ```text
/// M w/(hbar sinh wT) sqrt(r1 r2) exp[-M w (r1^2 + r2^2) coth(wT) / (2 hbar)]
///     I_mu(M w r1 r2 / (hbar sinh wT))
/// ```
///
/// With `M -> -i M` this is the hyperbolic kernel.
pub fn kernel_euclid_with_mass(
    model: &ConformalModel,
    mass: Complex64,
    r1: f64,
    r2: f64,
    t: f64,
) -> Result<Complex64, PathIntError> {
    check_points(r1, r2, t)?;
    let w = model.omega();
    let sh = (w * t).sinh();
    let coth = 1.0 / (w * t).tanh();
    let m_over_h = mass / model.hbar;
    let pref = m_over_h * w / sh;
    let expo = -m_over_h * w * (r1 * r1 + r2 * r2) * coth / 2.0;
    let arg = m_over_h * w * r1 * r2 / sh;
    Ok(pref * (r1 * r2).sqrt() * expo.exp() * bessel_i(model.mu(), arg)?)
}

/// Euclidean elliptic kernel for the real mass, evaluated with the scaled
/// Bessel function so that large arguments do not overflow.
pub fn kernel_r_euclid(model: &ConformalModel, r1: f64, r2: f64, t: f64) -> Result<f64, PathIntError> {
    check_points(r1, r2, t)?;
    let c = model.mass * model.omega() / model.hbar;
    let wt = model.omega() * t;
    let x = c * r1 * r2 / wt.sinh();
    let expo = -0.5 * c * (r1 * r1 + r2 * r2) / wt.tanh() + x;
    Ok(c / wt.sinh() * (r1 * r2).sqrt() * expo.exp() * bessel_i_scaled(model.mu(), x)?)
}

/// Euclidean kernel of the free conformal Hamiltonian (`omega -> 0`):
/// `(M/(hbar T)) sqrt(r1 r2) exp[-M(r1^2 + r2^2)/(2 hbar T)] I_mu(M r1 r2/(hbar T))`.
pub fn free_conformal_kernel_euclid(model: &ConformalModel, r1: f64, r2: f64, t: f64) -> Result<f64, PathIntError> {
    check_points(r1, r2, t)?;
    let a = model.mass / (model.hbar * t);
    let x = a * r1 * r2;
    let expo = -0.5 * a * (r1 * r1 + r2 * r2) + x;
    Ok(a * (r1 * r2).sqrt() * expo.exp() * bessel_i_scaled(model.mu(), x)?)
}

/// Evaluates `K_R`, `K_S` (via the imaginary-mass relation) or `K_R_Euclid`.
pub fn propagator(
    model: &ConformalModel,
    kind: KernelKind,
    r1: f64,
    r2: f64,
    t: f64,
) -> Result<KernelValue, PathIntError> {
    let value = match kind {
        KernelKind::KR => kernel_r_complex(model, Complex64::new(model.omega(), 0.0), r1, r2, t)?,
        KernelKind::KS => kernel_euclid_with_mass(model, Complex64::new(0.0, -model.mass), r1, r2, t)?,
        KernelKind::KREuclid => Complex64::new(kernel_r_euclid(model, r1, r2, t)?, 0.0),
        KernelKind::GR | KernelKind::GS => {
            return Err(PathIntError::Domain("propagator takes K_R, K_S or K_R_Euclid".into()));
        }
    };
    Ok(KernelValue::finite(kind, value))
}

/// `|int_0^inf K(r2, r; T2) K(r, r1; T1) dr - K(r2, r1; T1 + T2)|` for the
/// Euclidean kernel, with the quadrature run at tolerance `tol`.
pub fn semigroup_check(
    model: &ConformalModel,
    r1: f64,
    r2: f64,
    t1: f64,
    t2: f64,
    tol: f64,
) -> Result<f64, PathIntError> {
    check_points(r1, r2, t1)?;
    check_points(r1, r2, t2)?;
    let f = |r: f64| {
        let a = kernel_r_euclid(model, r2, r, t2).unwrap_or(f64::NAN);
        let b = kernel_r_euclid(model, r, r1, t1).unwrap_or(f64::NAN);
        a * b
    };
    let composed = quad::exp_sinh(f, 0.0, model.length_scale(), tol)?;
    Ok((composed - kernel_r_euclid(model, r2, r1, t1 + t2)?).abs())
}
