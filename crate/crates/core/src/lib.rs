//! Conformal quantum mechanics of causal diamonds.
//!
//! The crate evaluates and cross-checks the closed-form objects of the
//! inverse-square (conformal) quantum mechanics that governs causal-diamond
//! observers:
//!
//! * [`algebra`]: sl(2,R) generators, discriminant classification, Poisson brackets;
//! * [`frames`]: effective-time maps, field maps, radial conformal Killing flows;
//! * [`dynamics`]: effective Hamiltonian orbits, Lyapunov rate, period and action;
//! * [`pathint`]: exact propagators, Whittaker Green's functions, traces, thermality;
//! * [`dos`]: densities of states of the hyperbolic operator by several routes;
//! * [`spectral`]: finite-difference eigensolver used as an independent oracle;
//! * [`specfun`], [`quad`], [`ode`]: numerical kernels shared by the above.
//!
//! Units: the model carries explicit `mass` and `hbar` (default 1) and the
//! diamond half-size `alpha`, with `omega = 1/alpha`.

pub mod acceptance;
pub mod algebra;
pub mod cli;
pub mod dos;
pub mod dynamics;
pub mod frames;
pub mod io;
pub mod ode;
pub mod pathint;
pub mod quad;
pub mod specfun;
pub mod spectral;

pub use algebra::{ConformalModel, GeneratorClass, GeneratorCoeffs};

use thiserror::Error;

/// Crate-level error wrapping each module's error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    SpecFun(#[from] specfun::SpecFunError),
    #[error(transparent)]
    Quad(#[from] quad::QuadError),
    #[error(transparent)]
    Ode(#[from] ode::OdeError),
    #[error(transparent)]
    Algebra(#[from] algebra::AlgebraError),
    #[error(transparent)]
    Frames(#[from] frames::FramesError),
    #[error(transparent)]
    Dynamics(#[from] dynamics::DynamicsError),
    #[error(transparent)]
    PathInt(#[from] pathint::PathIntError),
    #[error(transparent)]
    Dos(#[from] dos::DosError),
    #[error(transparent)]
    Spectral(#[from] spectral::SpectralError),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}
