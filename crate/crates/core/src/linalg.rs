//! Dense eigenvalue helpers on top of nalgebra.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Eigenvalues of a general complex matrix (complex Schur form).
pub fn eigenvalues_general(m: &DMatrix<Complex64>) -> Result<Vec<Complex64>> {
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    let schur = m
        .clone()
        .try_schur(1e-15 * m.norm().max(f64::MIN_POSITIVE), 10_000)
        .ok_or_else(|| Error::Eigen("Schur iteration did not converge".into()))?;
    let ev = schur.eigenvalues().ok_or_else(|| Error::Eigen("Schur form is not triangular".into()))?;
    Ok(ev.iter().copied().collect())
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn eigenvalues_hermitian(m: &DMatrix<Complex64>) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}
