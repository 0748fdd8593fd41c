//! Exact propagators, energy Green's functions, traces and thermality.
//!
//! Kernels are radial, of conformal index `mu = sqrt(g + 1/4)`, with explicit
//! `mass` and `hbar`. The half-line model carries equal parity channels, so
//! the assembled kernel equals the radial one for same-sign endpoints.

use num_complex::Complex64;
use thiserror::Error;

use crate::quad::QuadError;
use crate::specfun::SpecFunError;

mod greens;
mod kernels;
mod traces;

pub use greens::{greens, greens_continued, greens_regularized, inverse_greens, pole_scan, GreensSide, PoleScan};
pub use kernels::{
    free_conformal_kernel_euclid, kernel_euclid_with_mass, kernel_r_complex, kernel_r_euclid, propagator,
    semigroup_check, CAUSTIC_TOL,
};
pub use traces::{
    aux_integral_check, diamond_temperature, mean_energy, partition_function, trace_z, DiamondThermality,
    PartitionMethod, ThermalReport, TraceMethod, TraceOp,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PathIntError {
    #[error("caustic: sin(omega T) vanishes at omega T = {omega_t}")]
    Caustic { omega_t: f64 },
    #[error("energy {energy} sits on the discrete level n = {n}")]
    SpectrumPole { n: u64, energy: f64 },
    #[error("invalid input: {0}")]
    Domain(String),
    #[error("pole scan failed: {0}")]
    Scan(String),
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum KernelKind {
    #[serde(rename = "K_R")]
    KR,
    #[serde(rename = "K_S")]
    KS,
    #[serde(rename = "K_R_Euclid")]
    KREuclid,
    #[serde(rename = "G_R")]
    GR,
    #[serde(rename = "G_S")]
    GS,
}

impl KernelKind {
    pub fn label(self) -> &'static str {
        match self {
            KernelKind::KR => "K_R",
            KernelKind::KS => "K_S",
            KernelKind::KREuclid => "K_R_Euclid",
            KernelKind::GR => "G_R",
            KernelKind::GS => "G_S",
        }
    }
}

/// Amplitude of a propagator or Green's function.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct KernelValue {
    pub value: Complex64,
    pub kind: KernelKind,
    /// Set only for placeholders at caustics, where `value` is NaN.
    pub caustic_flag: bool,
}

impl KernelValue {
    pub(crate) fn finite(kind: KernelKind, value: Complex64) -> Self {
        KernelValue {
            value,
            kind,
            caustic_flag: false,
        }
    }

    /// Placeholder for table output at a caustic.
    pub fn caustic(kind: KernelKind) -> Self {
        KernelValue {
            value: Complex64::new(f64::NAN, f64::NAN),
            kind,
            caustic_flag: true,
        }
    }
}

/// Full-line kernel from the two parity channels, `(K_- + sgn(q1 q2) K_+)/2`.
pub fn parity_assemble(k_half_minus: Complex64, k_half_plus: Complex64, q1: f64, q2: f64) -> Complex64 {
    let eps = if q1 * q2 > 0.0 {
        1.0
    } else if q1 * q2 < 0.0 {
        -1.0
    } else {
        0.0
    };
    0.5 * (k_half_minus + eps * k_half_plus)
}
