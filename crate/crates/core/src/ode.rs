//! Dormand–Prince 5(4) adaptive Runge–Kutta integrator on fixed-size states.
//!
//! Steps are accepted when the embedded error estimate, measured in the
//! mixed norm `atol + rtol * |y|`, is at most one. The final step is
//! shortened so the integration lands exactly on the requested end time.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OdeError {
    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64 },
    #[error("exceeded {steps} steps before reaching t = {t_end}")]
    TooManySteps { steps: usize, t_end: f64 },
    #[error("non-finite state at t = {t}")]
    NonFinite { t: f64 },
    #[error("end time {t_end} precedes start time {t0}")]
    Backwards { t0: f64, t_end: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Tolerances {
    pub fn new(rtol: f64, atol: f64) -> Self {
        Tolerances {
            rtol,
            atol,
            max_steps: 2_000_000,
        }
    }
}

/// Returned by an observer after every accepted step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Control {
    Continue,
    Stop,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome<const N: usize> {
    pub t: f64,
    pub y: [f64; N],
    pub steps: usize,
    pub rejected: usize,
    pub stopped: bool,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn lin<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        *o += h * acc;
    }
    out
}

fn finite<const N: usize>(y: &[f64; N]) -> bool {
    y.iter().all(|v| v.is_finite())
}

/// Integrates `y' = f(t, y)` from `t0` to `t_end`, calling `observe` after
/// each accepted step (and once at `t0`).
pub fn integrate<const N: usize, F, O>(
    f: F,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    tol: &Tolerances,
    mut observe: O,
) -> Result<Outcome<N>, OdeError>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
    O: FnMut(f64, &[f64; N]) -> Control,
{
    if t_end < t0 {
        return Err(OdeError::Backwards { t0, t_end });
    }
    let mut out = Outcome {
        t: t0,
        y: y0,
        steps: 0,
        rejected: 0,
        stopped: false,
    };
    if observe(t0, &y0) == Control::Stop {
        out.stopped = true;
        return Ok(out);
    }
    if t_end == t0 {
        return Ok(out);
    }
    let scale = |y: &[f64; N], i: usize| tol.atol + tol.rtol * y[i].abs();
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);
    if !finite(&k1) {
        return Err(OdeError::NonFinite { t });
    }
    // starting step from the size of y and y'
    let d0 = (0..N).map(|i| (y[i] / scale(&y, i)).powi(2)).sum::<f64>().sqrt();
    let d1 = (0..N).map(|i| (k1[i] / scale(&y, i)).powi(2)).sum::<f64>().sqrt();
    let mut h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h = h.min(t_end - t0);
    let span = t_end - t0;

    loop {
        if out.steps + out.rejected >= tol.max_steps {
            return Err(OdeError::TooManySteps {
                steps: tol.max_steps,
                t_end,
            });
        }
        let last = t + h >= t_end;
        if last {
            h = t_end - t;
        }
        if h <= 1e-14 * span.max(t.abs()) && !last {
            return Err(OdeError::StepUnderflow { t });
        }
        let k2 = f(t + C2 * h, &lin(&y, h, &[(A21, &k1)]));
        let k3 = f(t + C3 * h, &lin(&y, h, &[(A31, &k1), (A32, &k2)]));
        let k4 = f(t + C4 * h, &lin(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = f(
            t + C5 * h,
            &lin(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let k6 = f(
            t + h,
            &lin(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        );
        let ynew = lin(&y, h, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
        let k7 = f(t + h, &ynew);
        let errv = lin(
            &[0.0; N],
            h,
            &[(E1, &k1), (E3, &k3), (E4, &k4), (E5, &k5), (E6, &k6), (E7, &k7)],
        );
        let err = if finite(&ynew) && finite(&k7) {
            ((0..N)
                .map(|i| {
                    let sc = tol.atol + tol.rtol * y[i].abs().max(ynew[i].abs());
                    (errv[i] / sc).powi(2)
                })
                .sum::<f64>()
                / N as f64)
                .sqrt()
        } else {
            f64::INFINITY
        };
        if err <= 1.0 {
            t = if last { t_end } else { t + h };
            y = ynew;
            k1 = k7;
            out.steps += 1;
            out.t = t;
            out.y = y;
            if observe(t, &y) == Control::Stop {
                out.stopped = true;
                return Ok(out);
            }
            if last {
                return Ok(out);
            }
            let fac = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            h *= fac;
        } else {
            out.rejected += 1;
            let fac = if err.is_finite() {
                (0.9 * err.powf(-0.2)).clamp(0.1, 1.0)
            } else {
                0.1
            };
            h *= fac;
            if h <= 1e-14 * span.max(t.abs()) {
                if !finite(&y) {
                    return Err(OdeError::NonFinite { t });
                }
                return Err(OdeError::StepUnderflow { t });
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exponential_decay() {
        let tol = Tolerances::new(1e-12, 1e-14);
        let out = integrate(
            |_, y: &[f64; 1]| [-y[0]],
            0.0,
            [1.0],
            3.0,
            &tol,
            |_, _| Control::Continue,
        )
        .unwrap();
        assert_eq!(out.t, 3.0);
        assert_relative_eq!(out.y[0], (-3f64).exp(), max_relative = 1e-10);
    }

    #[test]
    fn harmonic_oscillator_period() {
        let tol = Tolerances::new(1e-11, 1e-13);
        let two_pi = 2.0 * std::f64::consts::PI;
        let out = integrate(
            |_, y: &[f64; 2]| [y[1], -y[0]],
            0.0,
            [1.0, 0.0],
            10.0 * two_pi,
            &tol,
            |_, _| Control::Continue,
        )
        .unwrap();
        assert!((out.y[0] - 1.0).abs() < 1e-8 && out.y[1].abs() < 1e-8, "{:?}", out.y);
    }

    #[test]
    fn observer_can_stop() {
        let tol = Tolerances::new(1e-8, 1e-10);
        let out = integrate(
            |_, y: &[f64; 1]| [y[0]],
            0.0,
            [1.0],
            100.0,
            &tol,
            |_, y| if y[0] > 10.0 { Control::Stop } else { Control::Continue },
        )
        .unwrap();
        assert!(out.stopped && out.y[0] > 10.0 && out.t < 100.0);
    }

    #[test]
    fn finite_time_blow_up_underflows() {
        // y' = y^2, y(0) = 1 blows up at t = 1
        let tol = Tolerances::new(1e-8, 1e-10);
        let r = integrate(
            |_, y: &[f64; 1]| [y[0] * y[0]],
            0.0,
            [1.0],
            2.0,
            &tol,
            |_, _| Control::Continue,
        );
        assert!(
            matches!(r, Err(OdeError::StepUnderflow { .. }) | Err(OdeError::NonFinite { .. })),
            "{r:?}"
        );
    }
}
