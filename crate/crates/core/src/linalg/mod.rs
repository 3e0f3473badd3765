//! Dense complex matrix arithmetic and the factorizations used by the rest
//! of the crate.
//!
//! Matrices are plain `nalgebra` column-major dense matrices over
//! `Complex64`. Every residual in this crate is measured with the Frobenius
//! norm, usually relative to the norm of the input.

mod eig;
mod hermitian;
mod polar;
mod schur;

pub use eig::{eig_general, eigvec_condition, right_eigensystem, EigenDecomposition};
pub use hermitian::{herm_eig, herm_exp, herm_sqrt};
pub use polar::{polar_decompose, PolarDecomposition};
pub use schur::{complex_schur, ComplexSchur};

use nalgebra::{DMatrix, DVector};
pub use num_complex::Complex64;

use crate::error::{Error, Result};

pub type ComplexMatrix = DMatrix<Complex64>;
pub type ComplexVector = DVector<Complex64>;

#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Builds a matrix from a row-major slice of complex entries.
pub fn from_rows(rows: usize, cols: usize, entries: &[Complex64]) -> ComplexMatrix {
    ComplexMatrix::from_row_slice(rows, cols, entries)
}

/// Builds a matrix from a row-major slice of real entries.
pub fn from_real_rows(rows: usize, cols: usize, entries: &[f64]) -> ComplexMatrix {
    ComplexMatrix::from_row_iterator(rows, cols, entries.iter().map(|&x| c64(x, 0.0)))
}

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

pub fn diag(values: &[Complex64]) -> ComplexMatrix {
    ComplexMatrix::from_diagonal(&ComplexVector::from_column_slice(values))
}

/// Frobenius norm.
#[inline]
pub fn fro(m: &ComplexMatrix) -> f64 {
    m.norm()
}

pub fn ensure_square(m: &ComplexMatrix) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(m.nrows())
}

pub fn ensure_finite(m: &ComplexMatrix) -> Result<()> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

pub fn ensure_same_dim(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<usize> {
    let n = ensure_square(a)?;
    let m = ensure_square(b)?;
    if n != m {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: m,
        });
    }
    Ok(n)
}

/// `‖M − M†‖_F`.
pub fn hermiticity_residual(m: &ComplexMatrix) -> f64 {
    fro(&(m - m.adjoint()))
}

/// `(M + M†) / 2`.
pub fn hermitian_part(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// `‖U†U − I‖_F`.
pub fn unitarity_residual(u: &ComplexMatrix) -> f64 {
    let n = u.ncols();
    fro(&(u.adjoint() * u - identity(n)))
}

/// Frobenius norm of the strictly off-diagonal part.
pub fn off_diagonal_norm(m: &ComplexMatrix) -> f64 {
    let mut acc = 0.0;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            if i != j {
                acc += m[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Inverse through LU with partial pivoting.
pub fn inverse(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    ensure_square(m)?;
    let inv = m.clone().lu().try_inverse().ok_or(Error::SingularInput)?;
    if inv.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(inv)
    } else {
        Err(Error::SingularInput)
    }
}

/// Singular values of a complex matrix, largest first.
pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    let mut sv: Vec<f64> = m
        .clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Spectral (2-norm) condition number; infinite for singular input.
pub fn condition_number(m: &ComplexMatrix) -> f64 {
    let sv = singular_values(m);
    match (sv.first(), sv.last()) {
        (Some(&max), Some(&min)) if min > 0.0 => max / min,
        (Some(_), Some(_)) => f64::INFINITY,
        _ => 1.0,
    }
}

/// Euclidean inner product `⟨a|b⟩`.
pub fn inner(a: &ComplexVector, b: &ComplexVector) -> Complex64 {
    a.dotc(b)
}
