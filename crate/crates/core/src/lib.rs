//! Numerics for the two-dimensional Pauli operator with an Aharonov–Bohm flux:
//! resolvent kernels, Birman–Schwinger bound-state solvers, weak-coupling
//! asymptotics and independent reference computations.

#![allow(clippy::excessive_precision, clippy::neg_cmp_op_on_partial_ord)]

pub mod bsolver;
pub mod error;
pub mod greenfn;
pub mod linalg;
pub mod oracle;
pub mod quad;
pub mod specfun;
pub mod weakcoupling;

pub use error::{Error, Result};
pub use greenfn::{FluxAlpha, PolarPoint, SpectralParameter, SpinChannel};
pub use num_complex::Complex64;
