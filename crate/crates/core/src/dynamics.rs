//! Classical dynamics of the effective Hamiltonians
//!
//! ```text
//! H_{R,S} = p^2/(2M) + hbar^2 g/(2 M q^2) +- M omega^2 q^2 / 2,   omega = 1/alpha
//! ```
//!
//! in the effective time `tau`. The R system has closed, isochronous orbits
//! (period `pi alpha`), the S system is unstable with Lyapunov rate `1/alpha`.

use thiserror::Error;

use crate::algebra::ConformalModel;
use crate::ode::{self, Control, OdeError, Tolerances};
use crate::quad;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("energy {energy} is below the potential minimum {minimum}")]
    BelowMinimum { energy: f64, minimum: f64 },
    #[error("trajectory blew up: q = {q:e} exceeds the bound at tau = {tau}")]
    BlowUp { tau: f64, q: f64 },
    #[error("separation never exceeded 10 delta0 (max ratio {max_ratio}, late-time rate {rate})")]
    InsufficientGrowth { rate: f64, max_ratio: f64 },
    #[error("invalid input: {0}")]
    Domain(String),
    #[error("turning-point quadrature did not converge (last change {change:e})")]
    NoConvergence { change: f64 },
    #[error(transparent)]
    Ode(#[from] OdeError),
}

/// Which effective Hamiltonian drives the motion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum EffectiveOp {
    /// elliptic: barrier plus oscillator
    R,
    /// hyperbolic: barrier plus inverted oscillator
    S,
    /// parabolic: barrier only
    H,
}

impl EffectiveOp {
    fn oscillator_sign(self) -> f64 {
        match self {
            EffectiveOp::R => 1.0,
            EffectiveOp::S => -1.0,
            EffectiveOp::H => 0.0,
        }
    }
}

/// Blow-up bound for the S system, in units of the crossover length.
pub const BLOW_UP_FACTOR: f64 = 1e8;

fn barrier_coeff(m: &ConformalModel, g: f64) -> f64 {
    m.hbar * m.hbar * g / (2.0 * m.mass)
}

fn potential_with(m: &ConformalModel, g: f64, op: EffectiveOp, q: f64) -> f64 {
    let w = m.omega();
    barrier_coeff(m, g) / (q * q) + op.oscillator_sign() * 0.5 * m.mass * w * w * q * q
}

/// `hbar^2 g/(2 M q^2) +- M omega^2 q^2/2` (no oscillator term for H).
pub fn effective_potential(model: &ConformalModel, op: EffectiveOp, q: f64) -> f64 {
    potential_with(model, model.g, op, q)
}

/// Length where barrier and oscillator balance, `(hbar^2 g alpha^2 / M^2)^{1/4}`.
pub fn crossover_length(model: &ConformalModel) -> f64 {
    (model.hbar * model.hbar * model.g * model.alpha * model.alpha / (model.mass * model.mass)).powf(0.25)
}

pub fn energy(model: &ConformalModel, op: EffectiveOp, q: f64, p: f64) -> f64 {
    p * p / (2.0 * model.mass) + effective_potential(model, op, q)
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct PhaseState {
    pub q: f64,
    pub p: f64,
    pub tau: f64,
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct Trajectory {
    pub samples: Vec<PhaseState>,
    pub energy: f64,
    /// Largest `|E(tau) - E(0)|` relative to the instantaneous sum of the
    /// magnitudes of the kinetic, barrier and oscillator terms.
    pub max_energy_drift: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct OrbitData {
    pub energy: f64,
    pub q_minus: f64,
    pub q_plus: f64,
    pub period: f64,
    pub jacobi_action: f64,
    pub langer_applied: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum Method {
    Quadrature,
    ClosedForm,
}

fn hamilton_rhs(model: ConformalModel, op: EffectiveOp) -> impl Fn(f64, &[f64; 2]) -> [f64; 2] {
    let c2 = 2.0 * barrier_coeff(&model, model.g);
    let k = op.oscillator_sign() * model.mass * model.omega() * model.omega();
    move |_t, y| [y[1] / model.mass, c2 / (y[0] * y[0] * y[0]) - k * y[0]]
}

/// Sum of the magnitudes of the kinetic, barrier and oscillator terms.
fn energy_scale(model: &ConformalModel, q: f64, p: f64) -> f64 {
    let w = model.omega();
    p * p / (2.0 * model.mass) + barrier_coeff(model, model.g) / (q * q) + 0.5 * model.mass * w * w * q * q
}

fn integrate_once(
    model: &ConformalModel,
    op: EffectiveOp,
    s0: &PhaseState,
    tau_max: f64,
    rtol: f64,
) -> Result<(Vec<PhaseState>, f64), DynamicsError> {
    let bound = BLOW_UP_FACTOR * crossover_length(model);
    let e0 = energy(model, op, s0.q, s0.p);
    let mut samples = Vec::new();
    let mut drift: f64 = 0.0;
    let mut blown = None;
    let tol = Tolerances::new(rtol, rtol * 1e-3 * crossover_length(model));
    ode::integrate(
        hamilton_rhs(*model, op),
        s0.tau,
        [s0.q, s0.p],
        s0.tau + tau_max,
        &tol,
        |t, y| {
            if y[0] > bound || y[0] <= 0.0 {
                blown = Some((t, y[0]));
                return Control::Stop;
            }
            samples.push(PhaseState {
                q: y[0],
                p: y[1],
                tau: t,
            });
            drift = drift.max((energy(model, op, y[0], y[1]) - e0).abs() / energy_scale(model, y[0], y[1]));
            Control::Continue
        },
    )?;
    if let Some((tau, q)) = blown {
        return Err(DynamicsError::BlowUp { tau, q });
    }
    Ok((samples, drift))
}

/// Integrates Hamilton's equations from `s0` for a span `tau_max`.
/// The relative energy drift is kept at or below `10 tol` by tightening the
/// internal step control when needed.
pub fn integrate(
    model: &ConformalModel,
    op: EffectiveOp,
    s0: &PhaseState,
    tau_max: f64,
    tol: f64,
) -> Result<Trajectory, DynamicsError> {
    if !(s0.q > 0.0) || !s0.p.is_finite() {
        return Err(DynamicsError::Domain(format!(
            "initial state needs q > 0, got q = {}",
            s0.q
        )));
    }
    if !(tol > 0.0 && tau_max >= 0.0) {
        return Err(DynamicsError::Domain("tol must be > 0 and tau_max >= 0".into()));
    }
    let mut rtol = tol;
    let mut last = None;
    for _ in 0..4 {
        let (samples, drift) = integrate_once(model, op, s0, tau_max, rtol)?;
        if drift <= 10.0 * tol {
            return Ok(Trajectory {
                samples,
                energy: energy(model, op, s0.q, s0.p),
                max_energy_drift: drift,
            });
        }
        last = Some((samples, drift));
        rtol *= 0.1;
    }
    let (samples, drift) = last.expect("at least one pass");
    log::warn!(
        "energy drift {drift:e} above 10*tol = {:e} after tightening",
        10.0 * tol
    );
    Ok(Trajectory {
        samples,
        energy: energy(model, op, s0.q, s0.p),
        max_energy_drift: drift,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct FieldSample {
    pub q: f64,
    pub p: f64,
    pub dq: f64,
    pub dp: f64,
}

/// Hamiltonian vector field `(dq, dp)` on a regular `nq x np` grid over
/// `[q_lo, q_hi] x [p_lo, p_hi]`, row-major in `p`.
pub fn phase_field(
    model: &ConformalModel,
    op: EffectiveOp,
    q_range: (f64, f64),
    p_range: (f64, f64),
    nq: usize,
    np: usize,
) -> Result<Vec<FieldSample>, DynamicsError> {
    if !(q_range.0 > 0.0 && q_range.1 > q_range.0 && p_range.1 > p_range.0 && nq >= 2 && np >= 2) {
        return Err(DynamicsError::Domain(
            "phase field needs 0 < q_lo < q_hi, p_lo < p_hi and at least 2x2 points".into(),
        ));
    }
    let f = hamilton_rhs(*model, op);
    let lerp = |(a, b): (f64, f64), i: usize, n: usize| a + (b - a) * i as f64 / (n - 1) as f64;
    let mut out = Vec::with_capacity(nq * np);
    for j in 0..np {
        let p = lerp(p_range, j, np);
        for i in 0..nq {
            let q = lerp(q_range, i, nq);
            let [dq, dp] = f(0.0, &[q, p]);
            out.push(FieldSample { q, p, dq, dp });
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct LyapunovEstimate {
    pub rate: f64,
    /// `(tau, cumulative ln(|delta|/delta0))` at each renormalization.
    pub log_growth: Vec<(f64, f64)>,
}

fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Twin-trajectory estimate of the largest Lyapunov exponent.
///
/// Separations are measured in the phase-space norm
/// `sqrt(dq^2 + (dp/(M omega))^2)`. The twin starts at distance `delta0` along
/// the diagonal `dq = dp/(M omega)`, and the separation is renormalized back to
/// `delta0` every `alpha/2` (or `tau_max/40` if shorter). The rate is the
/// least-squares slope of the cumulative log growth over `[tau_max/2, tau_max]`.
pub fn lyapunov_estimate(
    model: &ConformalModel,
    op: EffectiveOp,
    s0: &PhaseState,
    delta0: f64,
    tau_max: f64,
) -> Result<LyapunovEstimate, DynamicsError> {
    if !(delta0 > 0.0 && tau_max > 0.0 && s0.q > delta0) {
        return Err(DynamicsError::Domain("need 0 < delta0 < q0 and tau_max > 0".into()));
    }
    let f = hamilton_rhs(*model, op);
    let rhs = |t: f64, y: &[f64; 4]| {
        let a = f(t, &[y[0], y[1]]);
        let b = f(t, &[y[2], y[3]]);
        [a[0], a[1], b[0], b[1]]
    };
    let pscale = model.mass * model.omega();
    let norm = |y: &[f64; 4]| ((y[2] - y[0]).powi(2) + ((y[3] - y[1]) / pscale).powi(2)).sqrt();
    let bound = BLOW_UP_FACTOR * crossover_length(model);
    let interval = (0.5 * model.alpha).min(tau_max / 40.0);
    let n = (tau_max / interval).round().max(1.0) as usize;
    let tol = Tolerances::new(1e-11, 1e-14 * crossover_length(model));

    let d = delta0 * std::f64::consts::FRAC_1_SQRT_2;
    let mut y = [s0.q, s0.p, s0.q + d, s0.p + d * pscale];
    let mut t = s0.tau;
    let mut cumulative = 0.0;
    let mut max_ratio: f64 = 1.0;
    let mut log_growth = Vec::with_capacity(n);
    for _ in 0..n {
        let out = ode::integrate(rhs, t, y, t + interval, &tol, |_, _| Control::Continue)?;
        t = out.t;
        y = out.y;
        if y[0] > bound || y[2] > bound {
            return Err(DynamicsError::BlowUp {
                tau: t,
                q: y[0].max(y[2]),
            });
        }
        let d = norm(&y);
        cumulative += (d / delta0).ln();
        max_ratio = max_ratio.max(cumulative.exp());
        log_growth.push((t - s0.tau, cumulative));
        let s = delta0 / d;
        y[2] = y[0] + (y[2] - y[0]) * s;
        y[3] = y[1] + (y[3] - y[1]) * s;
    }
    let late: Vec<(f64, f64)> = log_growth
        .iter()
        .copied()
        .filter(|p| p.0 >= 0.5 * tau_max - 1e-12)
        .collect();
    let rate = if late.len() >= 2 {
        least_squares_slope(&late)
    } else {
        cumulative / tau_max
    };
    if max_ratio < 10.0 {
        return Err(DynamicsError::InsufficientGrowth { rate, max_ratio });
    }
    Ok(LyapunovEstimate { rate, log_growth })
}

/// Classical minimum of the R potential, `hbar omega sqrt(g)`.
pub fn r_minimum(model: &ConformalModel) -> f64 {
    model.hbar * model.omega() * model.g.sqrt()
}

/// Roots `x = q^2` of `E = V_R` for the coupling `g`.
fn turning_squares(model: &ConformalModel, g: f64, e: f64) -> Result<(f64, f64), DynamicsError> {
    let w = model.omega();
    let emin = model.hbar * w * g.sqrt();
    if !(e.is_finite()) || e < emin * (1.0 - 1e-14) {
        return Err(DynamicsError::BelowMinimum {
            energy: e,
            minimum: emin,
        });
    }
    let disc = (e * e - emin * emin).max(0.0).sqrt();
    let mw2 = model.mass * w * w;
    let x_plus = (e + disc) / mw2;
    let product = (model.hbar * model.hbar * g) / (model.mass * model.mass * w * w);
    Ok((product / x_plus, x_plus))
}

/// Turning points `(q_minus, q_plus)` of the R orbit at energy `E`.
pub fn turning_points(model: &ConformalModel, e: f64) -> Result<(f64, f64), DynamicsError> {
    let (xm, xp) = turning_squares(model, model.g, e)?;
    Ok((xm.sqrt(), xp.sqrt()))
}

/// Adaptive Gauss–Chebyshev: doubles the node count until two estimates agree.
fn chebyshev_adaptive(rule: impl Fn(usize) -> f64) -> Result<f64, DynamicsError> {
    let mut n = 16;
    let mut prev = rule(n);
    while n < 1 << 17 {
        n *= 2;
        let next = rule(n);
        let change = (next - prev).abs();
        if change <= 1e-13 * next.abs().max(f64::MIN_POSITIVE) {
            return Ok(next);
        }
        prev = next;
    }
    Err(DynamicsError::NoConvergence { change: f64::NAN })
}

/// Period `2 int M dq / p = int_{x-}^{x+} M dx / (sqrt(x) p(x))` for a generic
/// potential `v(q)`, with `x = q^2` and Gauss–Chebyshev weighting of the endpoint roots.
pub fn loop_period<V: Fn(f64) -> f64>(
    v: V,
    mass: f64,
    e: f64,
    x_minus: f64,
    x_plus: f64,
) -> Result<f64, DynamicsError> {
    let smooth = |x: f64| {
        let kin = (2.0 * mass * (e - v(x.sqrt()))).max(0.0);
        mass / (x.sqrt() * kin.sqrt()) * ((x_plus - x) * (x - x_minus)).sqrt()
    };
    chebyshev_adaptive(|n| quad::gauss_chebyshev_first(smooth, x_minus, x_plus, n))
}

/// `2 int_{q-}^{q+} p dq = int_{x-}^{x+} p(x)/sqrt(x) dx` for a generic potential.
pub fn loop_action<V: Fn(f64) -> f64>(
    v: V,
    mass: f64,
    e: f64,
    x_minus: f64,
    x_plus: f64,
) -> Result<f64, DynamicsError> {
    let smooth = |x: f64| {
        let kin = (2.0 * mass * (e - v(x.sqrt()))).max(0.0);
        kin.sqrt() / (x.sqrt() * ((x_plus - x) * (x - x_minus)).sqrt())
    };
    chebyshev_adaptive(|n| quad::gauss_chebyshev_second(smooth, x_minus, x_plus, n))
}

fn degenerate(xm: f64, xp: f64) -> bool {
    xp - xm <= 1e-12 * xp
}

/// Period of the closed R orbit at energy `E`.
pub fn period(model: &ConformalModel, e: f64, method: Method) -> Result<f64, DynamicsError> {
    let (xm, xp) = turning_squares(model, model.g, e)?;
    let closed = std::f64::consts::PI * model.alpha;
    match method {
        Method::ClosedForm => Ok(closed),
        Method::Quadrature => {
            if degenerate(xm, xp) {
                // small-oscillation limit about the minimum
                let q0 = xp.sqrt();
                let w = model.omega();
                let curv = 6.0 * barrier_coeff(model, model.g) / q0.powi(4) + model.mass * w * w;
                return Ok(2.0 * std::f64::consts::PI / (curv / model.mass).sqrt());
            }
            Ok(loop_period(
                |q| effective_potential(model, EffectiveOp::R, q),
                model.mass,
                e,
                xm,
                xp,
            )?)
        }
    }
}

/// Abbreviated action `oint p dq` of the R orbit; `langer` replaces
/// `sqrt(g)` by `mu = sqrt(g + 1/4)`.
pub fn jacobi_action(model: &ConformalModel, e: f64, langer: bool, method: Method) -> Result<f64, DynamicsError> {
    let g = if langer { model.g + 0.25 } else { model.g };
    match method {
        Method::ClosedForm => {
            turning_squares(model, model.g, e)?;
            Ok(std::f64::consts::PI * (e / model.omega() - model.hbar * g.sqrt()))
        }
        Method::Quadrature => {
            let (xm, xp) = turning_squares(model, g, e)?;
            if degenerate(xm, xp) {
                return Ok(0.0);
            }
            loop_action(|q| potential_with(model, g, EffectiveOp::R, q), model.mass, e, xm, xp)
        }
    }
}

/// Turning points, period and action of the R orbit (closed forms).
pub fn orbit_data(model: &ConformalModel, e: f64, langer: bool) -> Result<OrbitData, DynamicsError> {
    let (q_minus, q_plus) = turning_points(model, e)?;
    Ok(OrbitData {
        energy: e,
        q_minus,
        q_plus,
        period: period(model, e, Method::ClosedForm)?,
        jacobi_action: jacobi_action(model, e, langer, Method::ClosedForm)?,
        langer_applied: langer,
    })
}
