//! Seeded random problem generators for property suites and benchmarks.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::{c64, diag, hermitian_part, inverse, ComplexMatrix};

/// Entries with independent standard normal real and imaginary parts.
pub fn gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |_, _| {
        c64(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    hermitian_part(&gaussian_matrix(rng, n))
}

/// Haar-distributed unitary from the QR factorization of a Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let qr = gaussian_matrix(rng, n).qr();
    let (mut q, r) = qr.unpack();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            c64(1.0, 0.0)
        };
        q.column_mut(j).iter_mut().for_each(|z| *z *= phase);
    }
    q
}

/// Non-zero diagonal entries with moduli in `[0.5, 2]` and uniform phases.
pub fn random_k<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|_| {
            let r: f64 = rng.random_range(0.5..2.0);
            let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            Complex64::from_polar(r, phi)
        })
        .collect()
}

/// A diagonalizable non-Hermitian matrix with a known real spectrum.
#[derive(Debug, Clone)]
pub struct QuasiHermitianSample {
    pub hamiltonian: ComplexMatrix,
    /// Ascending, separated by at least 0.2.
    pub energies: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

/// `H = V diag(E) V⁻¹` with `V = I + G / (2√n)` for Gaussian `G`, which keeps
/// the eigenbasis moderately conditioned while far from unitary.
pub fn random_quasi_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> QuasiHermitianSample {
    loop {
        let g = gaussian_matrix(rng, n);
        let v = ComplexMatrix::identity(n, n) + g.scale(0.5 / (n as f64).sqrt());
        let Ok(v_inv) = inverse(&v) else { continue };
        let mut e = Vec::with_capacity(n);
        let mut acc: f64 = rng.random_range(-2.0..0.0);
        for _ in 0..n {
            e.push(acc);
            acc += rng.random_range(0.2..1.0);
        }
        let d = diag(&e.iter().map(|&x| c64(x, 0.0)).collect::<Vec<_>>());
        return QuasiHermitianSample {
            hamiltonian: &v * d * v_inv,
            energies: e,
            eigenvectors: v,
        };
    }
}
