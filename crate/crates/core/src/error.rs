use thiserror::Error;

/// Errors produced by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported Bessel order {0}: integer orders other than 0 are not handled")]
    UnsupportedOrder(f64),

    #[error("points coincide; the kernel is singular on the diagonal")]
    DiagonalSingularity,

    #[error("boundary fit is ill-conditioned (condition number {cond:.3e})")]
    FitFailure { cond: f64 },

    #[error("Neumann series invalid: eps * ||Q|| = {norm:.4} >= 1")]
    NeumannInvalid { norm: f64 },

    #[error("integration did not converge: {0}")]
    Integration(String),

    #[error("eigenvalue solver failed: {0}")]
    Eigen(String),

    #[error("unsupported input: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
