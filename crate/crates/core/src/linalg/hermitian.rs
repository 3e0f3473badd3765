use nalgebra::linalg::SymmetricEigen;

use super::{
    ensure_finite, ensure_square, fro, hermitian_part, hermiticity_residual, ComplexMatrix,
};
use crate::error::{Error, Result};
use crate::tolerance::Tolerances;

fn check_hermitian(p: &ComplexMatrix, tol: &Tolerances) -> Result<()> {
    ensure_square(p)?;
    ensure_finite(p)?;
    let residual = hermiticity_residual(p);
    let threshold = tol.residual_rel * fro(p);
    if residual > threshold {
        return Err(Error::NotHermitian {
            residual,
            threshold,
        });
    }
    Ok(())
}

/// Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian matrix.
///
/// Only the Hermitian part of `p` is used; callers validate Hermiticity.
pub fn herm_eig(p: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let n = p.nrows();
    let eig = SymmetricEigen::new(hermitian_part(p));
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, idx[c])]);
    (values, vectors)
}

/// `V f(Λ) V†` for real `f` applied to the spectrum of a Hermitian matrix.
fn spectral_map(values: &[f64], vectors: &ComplexMatrix, f: impl Fn(f64) -> f64) -> ComplexMatrix {
    let mut scaled = vectors.clone();
    for (k, &lambda) in values.iter().enumerate() {
        let fk = f(lambda);
        scaled.column_mut(k).iter_mut().for_each(|z| *z *= fk);
    }
    hermitian_part(&(scaled * vectors.adjoint()))
}

/// Hermitian positive-definite square root `R` with `R R = P`.
pub fn herm_sqrt(p: &ComplexMatrix, tol: &Tolerances) -> Result<ComplexMatrix> {
    check_hermitian(p, tol)?;
    let (values, vectors) = herm_eig(p);
    let threshold = tol.positivity_rel * fro(p);
    let min = values.first().copied().unwrap_or(f64::INFINITY);
    if min <= threshold {
        return Err(Error::NotPositiveDefinite {
            min_eigenvalue: min,
            threshold,
        });
    }
    Ok(spectral_map(&values, &vectors, f64::sqrt))
}

/// `exp(scale · S)` for Hermitian `S`, through its eigendecomposition.
pub fn herm_exp(s: &ComplexMatrix, scale: f64, tol: &Tolerances) -> Result<ComplexMatrix> {
    check_hermitian(s, tol)?;
    let (values, vectors) = herm_eig(s);
    Ok(spectral_map(&values, &vectors, |x| (scale * x).exp()))
}
