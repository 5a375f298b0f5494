//! Eigendecomposition of small Hermitian matrices.
//!
//! Thin wrapper over nalgebra's Hermitian solver (Householder reduction to a
//! real tridiagonal form plus implicit QR) that returns eigenpairs sorted by
//! descending eigenvalue in this crate's matrix type.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use super::HERMITIAN_TOL;
use crate::error::{Error, Result};

/// Eigenvalues (descending) and the matching orthonormal eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    /// Column `k` as a vector.
    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        (0..self.vectors.dim()).map(|r| self.vectors[(r, k)]).collect()
    }
}

pub fn hermitian_eigen(m: &ComplexMatrix) -> Result<HermitianEigen> {
    let deviation = m.hermiticity_deviation();
    if deviation > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    let d = m.dim();
    let a = m.hermitian_part();
    let dense = DMatrix::from_fn(d, d, |r, c| a[(r, c)]);
    let eig = dense.symmetric_eigen();

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = ComplexMatrix::from_fn(d, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(HermitianEigen { values, vectors })
}

/// Sum of `|λ_k|`.
pub fn trace_norm(m: &ComplexMatrix) -> Result<f64> {
    Ok(hermitian_eigen(m)?.values.iter().map(|l| l.abs()).sum())
}
