//! Special functions: complex gamma family, modified Bessel `I_nu`,
//! confluent hypergeometric `M`/`U`, and Whittaker `M`/`W`.
//!
//! All functions use the principal branch; complex powers are taken through
//! the principal logarithm. Accuracy target is 1e-12 relative inside the
//! documented domains.

mod bessel;
pub(crate) mod dd;
mod gamma;
mod hyper;
mod whittaker;

use thiserror::Error;

pub use bessel::{bessel_i, bessel_i_scaled, BESSEL_OVERFLOW_RE};
pub use gamma::{digamma, gamma, ln_gamma, ln_gamma_real, rgamma};
pub use hyper::{hyp1f1, hyperu, M_SERIES_RADIUS};
pub use whittaker::{whittaker_m, whittaker_m_on, whittaker_w, whittaker_w_on, BranchSide};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecFunError {
    #[error("{function} has a pole at {at}")]
    Pole { function: &'static str, at: f64 },
    #[error("{function}: parameter {parameter} = {value} is a nonpositive integer")]
    ParameterPole {
        function: &'static str,
        parameter: &'static str,
        value: f64,
    },
    #[error("{function} overflows: |Re z| exceeds {threshold}")]
    Overflow { function: &'static str, threshold: f64 },
    #[error("{function}: z = {z} lies on the branch cut; choose a side")]
    BranchCut { function: &'static str, z: f64 },
    #[error("{function} did not converge")]
    NoConvergence { function: &'static str },
    #[error("{0}")]
    Domain(String),
}
