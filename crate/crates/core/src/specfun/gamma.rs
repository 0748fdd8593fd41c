//! Complex log-gamma, reciprocal gamma and digamma.
//!
//! | function    | method                                                    |
//! |-------------|-----------------------------------------------------------|
//! | `ln_gamma`  | upward shift to `|z| >= 15`, Stirling series, reflection |
//! | `rgamma`    | `exp(-ln_gamma)`, reflection via `sin(pi z)/pi`           |
//! | `digamma`   | upward shift to `Re z >= 15`, asymptotic series, `cot`    |

use num_complex::Complex64;
use std::f64::consts::PI;

use super::SpecFunError;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;
const SHIFT_RADIUS: f64 = 15.0;

/// Bernoulli numbers B_2, B_4, ..., B_16.
const BERNOULLI: [f64; 8] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
];

fn is_nonpositive_integer(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

/// `ln sin(pi z)` on a branch valid for any `z` off the real poles,
/// without overflow for large `|Im z|`.
fn ln_sin_pi(z: Complex64) -> Complex64 {
    let i = Complex64::i();
    if z.im.abs() < 10.0 {
        return (z * PI).sin().ln();
    }
    // sin(pi z) = -e^{-i pi z}(1 - e^{2 i pi z})/(2i) for Im z > 0
    if z.im > 0.0 {
        let e = (2.0 * PI * i * z).exp();
        -i * PI * z + (Complex64::new(1.0, 0.0) - e).ln() + Complex64::new(-(2f64.ln()), PI / 2.0)
    } else {
        ln_sin_pi(z.conj()).conj()
    }
}

fn cot_pi(z: Complex64) -> Complex64 {
    let i = Complex64::i();
    let w = z * PI;
    if w.im >= 0.0 {
        let q = (2.0 * i * w).exp();
        i * (q + 1.0) / (q - 1.0)
    } else {
        let q = (-2.0 * i * w).exp();
        i * (q + 1.0) / (1.0 - q)
    }
}

fn ln_gamma_stirling(z: Complex64) -> Complex64 {
    let mut s = (z - 0.5) * z.ln() - z + LN_SQRT_2PI;
    let zinv = 1.0 / z;
    let z2inv = zinv * zinv;
    let mut zp = zinv;
    for (k, b) in BERNOULLI.iter().enumerate() {
        let n = 2.0 * (k as f64 + 1.0);
        s += b / (n * (n - 1.0)) * zp;
        zp *= z2inv;
    }
    s
}

/// Principal-branch `ln Gamma(z)`.
pub fn ln_gamma(z: Complex64) -> Result<Complex64, SpecFunError> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(SpecFunError::Domain(format!("ln_gamma of non-finite {z}")));
    }
    if is_nonpositive_integer(z) {
        return Err(SpecFunError::Pole {
            function: "ln_gamma",
            at: z.re,
        });
    }
    if z.re < 0.5 {
        let refl = ln_gamma(Complex64::new(1.0, 0.0) - z)?;
        return Ok(Complex64::new(PI.ln(), 0.0) - ln_sin_pi(z) - refl);
    }
    let mut shift = Complex64::new(0.0, 0.0);
    let mut w = z;
    while w.norm() < SHIFT_RADIUS {
        shift += w.ln();
        w += 1.0;
    }
    Ok(ln_gamma_stirling(w) - shift)
}

/// `ln Gamma(x)` for real `x > 0`.
pub fn ln_gamma_real(x: f64) -> Result<f64, SpecFunError> {
    if x <= 0.0 {
        return Err(SpecFunError::Domain(format!("ln_gamma_real needs x > 0, got {x}")));
    }
    Ok(ln_gamma(Complex64::new(x, 0.0))?.re)
}

/// `Gamma(z)`.
pub fn gamma(z: Complex64) -> Result<Complex64, SpecFunError> {
    Ok(ln_gamma(z)?.exp())
}

/// `1/Gamma(z)`, an entire function; exactly zero at the poles of Gamma.
pub fn rgamma(z: Complex64) -> Complex64 {
    if is_nonpositive_integer(z) {
        return Complex64::new(0.0, 0.0);
    }
    if z.re < 0.5 {
        let one_minus = Complex64::new(1.0, 0.0) - z;
        // finite: 1 - z has Re > 1/2
        let lg = ln_gamma(one_minus).expect("Re(1-z) > 1/2");
        return (ln_sin_pi(z) + lg).exp() / PI;
    }
    (-ln_gamma(z).expect("Re z >= 1/2")).exp()
}

/// Digamma `psi(z) = d/dz ln Gamma(z)`.
pub fn digamma(z: Complex64) -> Result<Complex64, SpecFunError> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(SpecFunError::Domain(format!("digamma of non-finite {z}")));
    }
    if is_nonpositive_integer(z) {
        return Err(SpecFunError::Pole {
            function: "digamma",
            at: z.re,
        });
    }
    if z.re < 0.5 {
        let one_minus = Complex64::new(1.0, 0.0) - z;
        return Ok(digamma(one_minus)? - PI * cot_pi(z));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    let mut w = z;
    while w.re < SHIFT_RADIUS {
        acc -= 1.0 / w;
        w += 1.0;
    }
    let winv = 1.0 / w;
    let w2inv = winv * winv;
    let mut s = w.ln() - 0.5 * winv;
    let mut wp = w2inv;
    for (k, b) in BERNOULLI.iter().enumerate() {
        let n = 2.0 * (k as f64 + 1.0);
        s -= b / n * wp;
        wp *= w2inv;
    }
    Ok(s + acc)
}
