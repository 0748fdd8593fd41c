use std::f64::consts::PI;

use num_complex::Complex64;

use super::kernels::kernel_r_euclid;
use super::PathIntError;
use crate::algebra::ConformalModel;
use crate::quad;
use crate::specfun::bessel_i_scaled;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum TraceOp {
    S,
    REuclid,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum TraceMethod {
    ClosedForm,
    Quadrature,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum PartitionMethod {
    ClosedForm,
    EigenSum,
}

const TRACE_TOL: f64 = 1e-12;

fn closed_trace(mu: f64, x: f64) -> f64 {
    (-mu * x).exp() / (2.0 * x.sinh())
}

/// Trace of the S or Euclidean R kernel over the half line. Both operators
/// share the value `e^{-mu w T}/(2 sinh w T)`; the quadrature always runs on
/// the positive Euclidean diagonal.
pub fn trace_z(model: &ConformalModel, _op: TraceOp, t: f64, method: TraceMethod) -> Result<Complex64, PathIntError> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(PathIntError::Domain(format!("trace needs T > 0, got {t}")));
    }
    let x = model.omega() * t;
    let v = match method {
        TraceMethod::ClosedForm => closed_trace(model.mu(), x),
        TraceMethod::Quadrature => {
            let c = model.mass * model.omega() / model.hbar;
            // the diagonal decays like exp(-c r^2 tanh(wT/2))
            let scale = 1.0 / (c * (0.5 * x).tanh()).sqrt();
            let f = |r: f64| kernel_r_euclid(model, r, r, t).unwrap_or(f64::NAN);
            quad::exp_sinh(f, 0.0, scale, TRACE_TOL)?
        }
    };
    Ok(Complex64::new(v, 0.0))
}

/// `|int_0^inf e^{-y coth z} I_mu(y / sinh z) dy - e^{-mu z}|`.
pub fn aux_integral_check(z: f64, mu: f64) -> Result<f64, PathIntError> {
    if !(z > 0.0 && mu > 0.0) {
        return Err(PathIntError::Domain("aux integral needs z > 0 and mu > 0".into()));
    }
    let decay = (0.5 * z).tanh();
    let f = |y: f64| (-y * decay).exp() * bessel_i_scaled(mu, y / z.sinh()).unwrap_or(f64::NAN);
    let v = quad::exp_sinh(f, 0.0, 1.0 / decay, TRACE_TOL)?;
    Ok((v - (-mu * z).exp()).abs())
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct ThermalReport {
    pub beta: f64,
    pub temperature: f64,
    pub partition_value: f64,
    pub eigenvalues_used: usize,
}

/// Canonical partition function of R at inverse temperature `beta`.
/// The eigen-sum over `E_n = hbar w (2n + mu + 1)` stops once the geometric
/// tail bound falls below `1e-14` of the running sum.
pub fn partition_function(
    model: &ConformalModel,
    beta: f64,
    method: PartitionMethod,
) -> Result<ThermalReport, PathIntError> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(PathIntError::Domain(format!(
            "partition function needs beta > 0, got {beta}"
        )));
    }
    let x = beta * model.hbar * model.omega();
    let (z, used) = match method {
        PartitionMethod::ClosedForm => (closed_trace(model.mu(), x), 0),
        PartitionMethod::EigenSum => {
            let ratio = (-2.0 * x).exp();
            let mut term = (-(model.mu() + 1.0) * x).exp();
            let mut sum = 0.0;
            let mut n = 0;
            loop {
                sum += term;
                n += 1;
                term *= ratio;
                if term / (1.0 - ratio) < 1e-14 * sum {
                    break;
                }
            }
            (sum, n)
        }
    };
    Ok(ThermalReport {
        beta,
        temperature: 1.0 / beta,
        partition_value: z,
        eigenvalues_used: used,
    })
}

/// `-d ln Z / d beta` by a central difference of the closed form.
pub fn mean_energy(model: &ConformalModel, beta: f64) -> Result<f64, PathIntError> {
    let h = 1e-5 * beta;
    let lz = |b: f64| partition_function(model, b, PartitionMethod::ClosedForm).map(|r| r.partition_value.ln());
    Ok(-(lz(beta + h)? - lz(beta - h)?) / (2.0 * h))
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct DiamondThermality {
    pub alpha: f64,
    pub beta: f64,
    #[serde(rename = "T_D")]
    pub temperature: f64,
    #[serde(rename = "lambda_L")]
    pub lyapunov: f64,
    pub bound: f64,
    pub ratio: f64,
    #[serde(rename = "Z")]
    pub partition_value: f64,
}

/// `T_D = hbar/(pi alpha)` with `beta = pi alpha/hbar`, compared with the
/// chaos bound `2 pi T_D/hbar` for `lambda_L = 1/alpha`.
pub fn diamond_temperature(model: &ConformalModel) -> DiamondThermality {
    let temperature = model.hbar / (PI * model.alpha);
    let beta = PI * model.alpha / model.hbar;
    let lyapunov = 1.0 / model.alpha;
    let bound = 2.0 * PI * temperature / model.hbar;
    let z = closed_trace(model.mu(), beta * model.hbar * model.omega());
    DiamondThermality {
        alpha: model.alpha,
        beta,
        temperature,
        lyapunov,
        bound,
        ratio: lyapunov / bound,
        partition_value: z,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn model(g: f64, alpha: f64) -> ConformalModel {
        ConformalModel::new(g, alpha).unwrap()
    }

    #[test]
    fn closed_trace_reference() {
        let m = model(2.0, 1.0);
        let z = trace_z(&m, TraceOp::S, 1.0, TraceMethod::ClosedForm).unwrap();
        assert_relative_eq!(z.re, 0.094_932_749_113_620_98, max_relative = 1e-14);
        assert_eq!(z, trace_z(&m, TraceOp::REuclid, 1.0, TraceMethod::ClosedForm).unwrap());
        let big = trace_z(&m, TraceOp::S, 30.0, TraceMethod::ClosedForm).unwrap().re;
        assert_relative_eq!(big, (-2.5f64 * 30.0).exp(), max_relative = 1e-12);
    }

    #[test]
    fn trace_quadrature_matches_closed_form() {
        for g in [1.0, 2.0] {
            let m = model(g, 1.0);
            for wt in [0.1, 0.5, 1.0, 2.0, 5.0] {
                let q = trace_z(&m, TraceOp::REuclid, wt, TraceMethod::Quadrature).unwrap().re;
                let c = trace_z(&m, TraceOp::REuclid, wt, TraceMethod::ClosedForm).unwrap().re;
                assert_relative_eq!(q, c, max_relative = 1e-8);
            }
        }
        // units enter only through omega T
        let m = ConformalModel::with_units(1.0, 2.0, 3.0, 0.5).unwrap();
        let q = trace_z(&m, TraceOp::REuclid, 1.4, TraceMethod::Quadrature).unwrap().re;
        assert_relative_eq!(q, closed_trace(m.mu(), 0.7), max_relative = 1e-8);
    }

    #[test]
    fn auxiliary_integral() {
        assert!(aux_integral_check(1.0, 1.5).unwrap() <= 1e-8);
        assert!(aux_integral_check(0.3, 0.7).unwrap() <= 1e-8);
        assert!(aux_integral_check(8.0, 1.2).unwrap() <= 1e-8);
        assert!(aux_integral_check(1.0, 0.0).is_err());
    }

    #[test]
    fn partition_sum_equals_closed_form() {
        for g in [1.0, 2.0] {
            let m = model(g, 1.0);
            for bw in [0.1, 0.3, 1.0, 3.0, 10.0] {
                let a = partition_function(&m, bw, PartitionMethod::ClosedForm).unwrap();
                let b = partition_function(&m, bw, PartitionMethod::EigenSum).unwrap();
                assert_relative_eq!(a.partition_value, b.partition_value, max_relative = 1e-10);
                assert!(b.eigenvalues_used >= 1);
                assert_eq!(a.temperature * a.beta, 1.0);
            }
        }
        let m = model(2.0, 1.0);
        let z = partition_function(&m, 1.0, PartitionMethod::ClosedForm)
            .unwrap()
            .partition_value;
        let t = trace_z(&m, TraceOp::S, 1.0, TraceMethod::ClosedForm).unwrap().re;
        assert_eq!(z, t);
    }

    #[test]
    fn mean_energy_envelope() {
        let m = model(1.0, 1.0);
        let e0 = m.hbar * m.omega() * (m.mu() + 1.0);
        for bw in [0.2, 1.0, 5.0, 20.0] {
            let e = mean_energy(&m, bw).unwrap();
            let upper = e0 + 2.0 * m.hbar * m.omega() / (bw * m.hbar * m.omega()).tanh();
            assert!(e >= e0 * (1.0 - 1e-9) && e <= upper, "beta {bw}: {e}");
        }
        let z = partition_function(&m, 40.0, PartitionMethod::ClosedForm)
            .unwrap()
            .partition_value;
        assert_relative_eq!(z, (-40.0 * e0).exp(), max_relative = 1e-12);
    }

    #[test]
    fn diamond_thermality() {
        let d = diamond_temperature(&model(1.0, 1.0));
        assert_eq!(d.temperature, 1.0 / PI);
        assert_eq!(d.lyapunov, 1.0);
        assert_relative_eq!(d.bound, 2.0, max_relative = 1e-15);
        for alpha in [0.5, 1.0, 2.0, 7.0, 1e3] {
            let d = diamond_temperature(&model(1.0, alpha));
            assert!((d.ratio - 0.5).abs() <= 1e-15);
            assert_relative_eq!(d.temperature * d.beta, 1.0, max_relative = 1e-15);
        }
        assert!(diamond_temperature(&model(1.0, 1e12)).temperature < 1e-12);
    }
}
