//! Finite-difference eigensolver for the effective potentials on a box.
//!
//! The operator `-(hbar^2/2M) d^2/dq^2 + V(q)` is discretized on the interior
//! points of `[q_min, L]` with Dirichlet ends, giving a symmetric tridiagonal
//! (second order) or pentadiagonal (fourth order) matrix. Eigenvalues are
//! located by bisection on the Sylvester inertia of `A - sigma I`, read off a
//! banded `L D L^T` factorization, and checked by inverse iteration.

use thiserror::Error;

use crate::algebra::ConformalModel;
use crate::dynamics::{effective_potential, EffectiveOp};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("invalid box: {0}")]
    InvalidBox(String),
    #[error("eigenvalue {index} failed the residual check ({residual:e})")]
    NotConverged { index: usize, residual: f64 },
    #[error("too few resolved levels around E = {energy} (count {count})")]
    InsufficientLevels { energy: f64, count: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum Potential {
    R,
    S,
}

impl Potential {
    fn op(self) -> EffectiveOp {
        match self {
            Potential::R => EffectiveOp::R,
            Potential::S => EffectiveOp::S,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct BoxDiscretization {
    pub q_min: f64,
    pub length: f64,
    pub n_points: usize,
    pub scheme_order: u8,
}

/// Smallest accepted number of interior points.
pub const MIN_POINTS: usize = 500;

impl BoxDiscretization {
    pub fn new(q_min: f64, length: f64, n_points: usize, scheme_order: u8) -> Result<Self, SpectralError> {
        if !(q_min > 0.0 && length > q_min && length.is_finite()) {
            return Err(SpectralError::InvalidBox(format!(
                "need 0 < q_min < L, got q_min = {q_min}, L = {length}"
            )));
        }
        if n_points < MIN_POINTS {
            return Err(SpectralError::InvalidBox(format!(
                "need at least {MIN_POINTS} points, got {n_points}"
            )));
        }
        if scheme_order != 2 && scheme_order != 4 {
            return Err(SpectralError::InvalidBox(format!(
                "scheme order must be 2 or 4, got {scheme_order}"
            )));
        }
        Ok(BoxDiscretization {
            q_min,
            length,
            n_points,
            scheme_order,
        })
    }

    pub fn spacing(&self) -> f64 {
        (self.length - self.q_min) / (self.n_points + 1) as f64
    }

    /// Interior grid point `i` (0-based).
    pub fn point(&self, i: usize) -> f64 {
        self.q_min + (i + 1) as f64 * self.spacing()
    }
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct SpectrumResult {
    pub eigenvalues: Vec<f64>,
    #[serde(rename = "box")]
    pub domain: BoxDiscretization,
    pub potential: Potential,
}

/// Symmetric banded matrix with constant off-diagonals.
#[derive(Clone, Debug)]
pub struct BandedOperator {
    diag: Vec<f64>,
    off1: f64,
    off2: f64,
}

impl BandedOperator {
    pub fn new(model: &ConformalModel, potential: Potential, domain: &BoxDiscretization) -> Self {
        let h = domain.spacing();
        let t = model.hbar * model.hbar / (2.0 * model.mass * h * h);
        let n = domain.n_points;
        let v = |i: usize| effective_potential(model, potential.op(), domain.point(i));
        if domain.scheme_order == 2 {
            let diag = (0..n).map(|i| 2.0 * t + v(i)).collect();
            BandedOperator {
                diag,
                off1: -t,
                off2: 0.0,
            }
        } else {
            let mut diag: Vec<f64> = (0..n).map(|i| 30.0 / 12.0 * t + v(i)).collect();
            // odd reflection through the Dirichlet ends
            diag[0] -= t / 12.0;
            diag[n - 1] -= t / 12.0;
            BandedOperator {
                diag,
                off1: -16.0 / 12.0 * t,
                off2: t / 12.0,
            }
        }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    fn gershgorin(&self) -> (f64, f64) {
        let r = 2.0 * (self.off1.abs() + self.off2.abs());
        let lo = self.diag.iter().cloned().fold(f64::INFINITY, f64::min) - r;
        let hi = self.diag.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + r;
        (lo, hi)
    }

    fn pivot_floor(&self) -> f64 {
        let (lo, hi) = self.gershgorin();
        f64::EPSILON * lo.abs().max(hi.abs())
    }

    /// `L D L^T` of `A - sigma I`; returns `(D, l1, l2)`.
    fn factor(&self, sigma: f64) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let n = self.len();
        let floor = self.pivot_floor();
        let mut d = vec![0.0; n];
        let mut l1 = vec![0.0; n];
        let mut l2 = vec![0.0; n];
        for i in 0..n {
            let mut di = self.diag[i] - sigma;
            if i >= 2 {
                l2[i] = self.off2 / d[i - 2];
                di -= l2[i] * l2[i] * d[i - 2];
            }
            if i >= 1 {
                let mut a = self.off1;
                if i >= 2 {
                    a -= l2[i] * d[i - 2] * l1[i - 1];
                }
                l1[i] = a / d[i - 1];
                di -= l1[i] * l1[i] * d[i - 1];
            }
            if di.abs() < floor {
                di = if di < 0.0 { -floor } else { floor };
            }
            d[i] = di;
        }
        (d, l1, l2)
    }

    /// Number of eigenvalues strictly below `sigma`.
    pub fn count_below(&self, sigma: f64) -> usize {
        self.factor(sigma).0.iter().filter(|&&x| x < 0.0).count()
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut y = self.diag[i] * x[i];
                if i >= 1 {
                    y += self.off1 * x[i - 1];
                }
                if i + 1 < n {
                    y += self.off1 * x[i + 1];
                }
                if i >= 2 {
                    y += self.off2 * x[i - 2];
                }
                if i + 2 < n {
                    y += self.off2 * x[i + 2];
                }
                y
            })
            .collect()
    }

    fn solve_shifted(&self, sigma: f64, b: &[f64]) -> Vec<f64> {
        let (d, l1, l2) = self.factor(sigma);
        let n = self.len();
        let mut y = b.to_vec();
        for i in 0..n {
            if i >= 1 {
                y[i] -= l1[i] * y[i - 1];
            }
            if i >= 2 {
                y[i] -= l2[i] * y[i - 2];
            }
        }
        for i in 0..n {
            y[i] /= d[i];
        }
        for i in (0..n).rev() {
            if i + 1 < n {
                y[i] -= l1[i + 1] * y[i + 1];
            }
            if i + 2 < n {
                y[i] -= l2[i + 2] * y[i + 2];
            }
        }
        y
    }

    /// `k`-th eigenvalue (0-based) by bisection on the inertia count.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        let (mut lo, mut hi) = self.gershgorin();
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// `||A x - lambda x|| / ||x||` after two steps of inverse iteration.
    pub fn residual(&self, lambda: f64) -> f64 {
        let n = self.len();
        let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * ((i * 7) % 13) as f64).collect();
        for _ in 0..2 {
            x = self.solve_shifted(lambda, &x);
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            x.iter_mut().for_each(|v| *v /= norm);
        }
        let ax = self.apply(&x);
        ax.iter()
            .zip(&x)
            .map(|(a, v)| (a - lambda * v).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    fn scale(&self) -> f64 {
        let (lo, hi) = self.gershgorin();
        lo.abs().max(hi.abs())
    }
}

/// Lowest `count` eigenvalues of the discretized operator.
pub fn eigenvalues(
    model: &ConformalModel,
    potential: Potential,
    domain: &BoxDiscretization,
    count: usize,
) -> Result<SpectrumResult, SpectralError> {
    if count == 0 || count * 10 > domain.n_points {
        return Err(SpectralError::InvalidBox(format!(
            "count must be between 1 and n_points/10, got {count}"
        )));
    }
    let op = BandedOperator::new(model, potential, domain);
    let tol = 1e-9 * op.scale();
    let mut eigenvalues = Vec::with_capacity(count);
    for k in 0..count {
        let lambda = op.eigenvalue(k);
        let residual = op.residual(lambda);
        if !(residual <= tol) {
            return Err(SpectralError::NotConverged { index: k, residual });
        }
        eigenvalues.push(lambda);
    }
    Ok(SpectrumResult {
        eigenvalues,
        domain: *domain,
        potential,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct StaircasePoint {
    pub energy: f64,
    pub count: usize,
    /// `5 / (E_{N+2} - E_{N-3})` (0-based levels), the inverse mean spacing
    /// over the five gaps around `E`
    pub rho: f64,
}

/// Level half-width of the smoothing window.
pub const STAIRCASE_HALF_WINDOW: usize = 3;

/// Counting function `N(E)` and its smoothed derivative on `e_grid`.
pub fn staircase(
    model: &ConformalModel,
    potential: Potential,
    domain: &BoxDiscretization,
    e_grid: &[f64],
) -> Result<Vec<StaircasePoint>, SpectralError> {
    let op = BandedOperator::new(model, potential, domain);
    let w = STAIRCASE_HALF_WINDOW;
    e_grid
        .iter()
        .map(|&energy| {
            let count = op.count_below(energy);
            if count < w || count + w >= op.len() / 4 {
                return Err(SpectralError::InsufficientLevels { energy, count });
            }
            let upper = op.eigenvalue(count + w - 1);
            let lower = op.eigenvalue(count - w);
            Ok(StaircasePoint {
                energy,
                count,
                rho: (2 * w - 1) as f64 / (upper - lower),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn model(g: f64, alpha: f64) -> ConformalModel {
        ConformalModel::new(g, alpha).unwrap()
    }

    fn level(m: &ConformalModel, n: usize) -> f64 {
        m.hbar * m.omega() * (2.0 * n as f64 + m.mu() + 1.0)
    }

    #[test]
    fn box_validation() {
        assert!(BoxDiscretization::new(0.0, 10.0, 1000, 4).is_err());
        assert!(BoxDiscretization::new(1e-3, 10.0, 100, 4).is_err());
        assert!(BoxDiscretization::new(1e-3, 10.0, 1000, 3).is_err());
        let b = BoxDiscretization::new(1.0, 11.0, 999, 2).unwrap();
        assert_eq!(b.spacing(), 0.01);
        assert_relative_eq!(b.point(998), 10.99, max_relative = 1e-14);
    }

    #[test]
    fn harmonic_check_without_barrier_scale() {
        // negligible potential: the discrete Laplacian has eigenvalues
        // 4 t sin^2(k pi / (2(n+1)))
        let m = ConformalModel::with_units(1e-12, 1e12, 1.0, 1.0).unwrap();
        let b = BoxDiscretization::new(1.0, 2.0, 999, 2).unwrap();
        let op = BandedOperator::new(&m, Potential::R, &b);
        let h = b.spacing();
        let t = 1.0 / (2.0 * h * h);
        for k in 0..5 {
            let want = 4.0 * t * ((k + 1) as f64 * std::f64::consts::PI / (2.0 * 1000.0)).sin().powi(2);
            assert_relative_eq!(op.eigenvalue(k), want, max_relative = 1e-9);
        }
    }

    #[test]
    fn elliptic_levels() {
        for g in [1.0, 2.0] {
            let m = model(g, 1.0);
            let b = BoxDiscretization::new(1e-3, 20.0, 4000, 4).unwrap();
            let s = eigenvalues(&m, Potential::R, &b, 6).unwrap();
            assert!(s.eigenvalues.windows(2).all(|w| w[1] > w[0]));
            for (n, e) in s.eigenvalues.iter().enumerate() {
                assert_relative_eq!(*e, level(&m, n), max_relative = 1e-4);
            }
            let gaps: Vec<f64> = s.eigenvalues.windows(2).map(|w| w[1] - w[0]).collect();
            for gap in gaps {
                assert_relative_eq!(gap, 2.0, max_relative = 1e-4);
            }
        }
        let m = model(1.0, 1.0);
        let b = BoxDiscretization::new(1e-3, 20.0, 4000, 4).unwrap();
        let e0 = eigenvalues(&m, Potential::R, &b, 1).unwrap().eigenvalues[0];
        assert_relative_eq!(e0, 2.118_034, max_relative = 1e-5);
    }

    #[test]
    fn low_levels_do_not_feel_the_wall() {
        let m = model(1.0, 1.0);
        // equal spacing so only the wall moves
        let a = BoxDiscretization::new(1e-3, 20.0, 4000, 4).unwrap();
        let n30 = ((30.0 - 1e-3) / a.spacing()).round() as usize - 1;
        let b = BoxDiscretization::new(1e-3, 1e-3 + (n30 + 1) as f64 * a.spacing(), n30, 4).unwrap();
        let e_a = eigenvalues(&m, Potential::R, &a, 1).unwrap().eigenvalues[0];
        let e_b = eigenvalues(&m, Potential::R, &b, 1).unwrap().eigenvalues[0];
        assert!(((e_a - e_b) / e_a).abs() < 1e-10);
    }

    #[test]
    fn richardson_ratio() {
        // g = 6: the regular solution behaves as q^3, odd like the ghost closure
        let m = model(6.0, 1.0);
        let exact = level(&m, 0);
        for (order, want) in [(2u8, 4.0), (4u8, 16.0)] {
            let err = |n: usize| {
                let b = BoxDiscretization::new(1e-3, 12.0, n, order).unwrap();
                (eigenvalues(&m, Potential::R, &b, 1).unwrap().eigenvalues[0] - exact).abs()
            };
            let ratio = err(600) / err(1201);
            assert!((ratio / want - 1.0).abs() < 0.3, "order {order}: ratio {ratio}");
        }
    }

    #[test]
    fn staircase_counts() {
        let m = model(1.0, 1.0);
        let b = BoxDiscretization::new(1e-3, 15.0, 3000, 4).unwrap();
        let grid: Vec<f64> = (0..8).map(|k| 2.0 + 2.0 * k as f64).collect();
        let st = staircase(&m, Potential::S, &b, &grid).unwrap();
        assert!(st.windows(2).all(|w| w[1].count >= w[0].count));
        assert!(st.iter().all(|p| p.rho > 0.0));
        let op = BandedOperator::new(&m, Potential::R, &b);
        assert_eq!(op.count_below(level(&m, 0) - 0.1), 0);
        assert!(matches!(
            staircase(&m, Potential::R, &b, &[1.0]),
            Err(SpectralError::InsufficientLevels { .. })
        ));
    }
}
