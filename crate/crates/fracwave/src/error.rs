//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by mesh construction, coefficient evaluation, kernel
/// compression and the PDE solvers.
#[derive(Debug, Error)]
pub enum Error {
    /// The fractional order must lie strictly inside (1, 2).
    #[error("fractional order alpha = {alpha} outside the open interval (1, 2)")]
    InvalidAlpha { alpha: f64 },

    /// A scalar or index argument violated its domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Problem data violated a structural requirement (boundary consistency,
    /// size mismatches between history and mesh, ...).
    #[error("inconsistent problem data: {0}")]
    Inconsistent(String),

    /// The sum-of-exponentials builder exhausted its node budget without
    /// meeting the requested tolerance on the verification grid.
    #[error(
        "sum-of-exponentials construction failed: achieved {achieved:.3e} > requested {requested:.3e} with {n_exp} exponentials"
    )]
    SoeTolerance {
        requested: f64,
        achieved: f64,
        n_exp: usize,
    },

    /// Evaluation time outside the compressed kernel's validity window.
    #[error("t = {t} outside the SOE validity window [{delta}, {t_max}]")]
    OutOfWindow { t: f64, delta: f64, t_max: f64 },

    /// Tridiagonal elimination hit a vanishing pivot.
    #[error("tridiagonal solve: pivot magnitude below 1e-300 at row {index}")]
    SingularPivot { index: usize },

    /// Experiment configuration failed validation.
    #[error("configuration error: {0}")]
    Config(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
