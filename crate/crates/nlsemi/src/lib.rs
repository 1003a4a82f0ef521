//! Numerical toolkit for nonlinear Schrödinger equations in the
//! small-dispersion (semiclassical) regime.
//!
//! The crate revolves around the family of equations
//!
//! ```text
//!     i ε ψ_t + (ε²/2) ψ_xx ± V(|ψ|²) ψ = 0,      V(u) = u^s / s,
//! ```
//!
//! with `+` the focusing and `−` the defocusing branch, together with a
//! nonlocal cubic variant where the potential is smoothed by a Helmholtz
//! operator.  As ε → 0 these equations formally reduce to quasilinear
//! systems for the density `u = |ψ|²` and velocity `v`; solutions of the
//! reduced systems develop gradient catastrophes at a finite time t₀, near
//! which the dispersive solution is described by Painlevé transcendents.
//!
//! The modules cover the full pipeline:
//!
//! * [`spectral`] — periodic grids, Fourier differentiation, filtering and
//!   conserved functionals;
//! * [`evolve`] — stiff pseudospectral time integration with a composite
//!   explicit/linearly-implicit Runge–Kutta scheme and blow-up detection;
//! * [`madelung`] — conversion between ψ and hydrodynamic variables, Riemann
//!   invariants, and the catalog of initial-data families;
//! * [`hodograph`] — semiclassical solutions by characteristics and
//!   hodograph transforms, break-up points and asymptotic constants;
//! * [`painleve`] — Chebyshev-collocation boundary-value solvers for the
//!   Painlevé-I tritronquée solution and the special solution of the
//!   fourth-order P_I² equation;
//! * [`matching`] — the universal local asymptotic formulas near break-up
//!   and matching-zone diagnostics against the PDE solution;
//! * [`experiments`] — batch drivers for scaling regressions, the blow-up
//!   time law, and report generation used by the `nlsemi` binary.

pub mod cheb;
pub mod config;
pub mod evolve;
pub mod experiments;
pub mod hodograph;
pub mod madelung;
pub mod matching;
pub mod model;
pub mod painleve;
pub mod quad;
pub mod regress;
pub mod report;
pub mod spectral;

use thiserror::Error;

/// Unified error type for the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("grid size {0} is not a power of two (or is below the minimum of 8)")]
    BadGridSize(usize),
    #[error("domain length must be positive, got {0}")]
    BadLength(f64),
    #[error("negative filter threshold {0}")]
    NegativeThreshold(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("time {t} is at or past the gradient catastrophe at t0 = {t0}; the semiclassical solution is multivalued there")]
    PastBreakup { t: f64, t0: f64 },
    #[error("Newton iteration failed to converge: {0}")]
    NewtonFailure(String),
    #[error("root solver failed: {0}")]
    RootFailure(String),
    #[error("case {0} is non-generic: {1}")]
    NonGeneric(String, String),
    #[error("series cannot reach the requested accuracy: floor {floor:.3e} at this argument")]
    SeriesFloor { floor: f64 },
    #[error("quadrature failed to reach tolerance: estimated error {0:.3e}")]
    QuadratureFailure(f64),
    #[error("phase seam mismatch: v-mean phase jump {0:.3e} rad is not a multiple of 2π")]
    SeamMismatch(f64),
    #[error("operation not supported for case {0}: {1}")]
    UnsupportedCase(String, String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
