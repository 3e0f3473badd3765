//! Right polar decomposition `M = W P` by the scaled Newton iteration
//! `X ← (ζX + ζ⁻¹X^{-†}) / 2`, which converges to the unitary factor.

use super::{ensure_finite, ensure_square, fro, hermitian_part, inverse, ComplexMatrix};
use crate::error::{Error, Result};

const MAX_ITER: usize = 100;
/// Frobenius condition estimate above which the input counts as singular.
const SINGULAR_COND: f64 = 1e14;

#[derive(Debug, Clone)]
pub struct PolarDecomposition {
    /// Unitary factor.
    pub w: ComplexMatrix,
    /// Hermitian positive semi-definite factor `(M†M)^{1/2}`.
    pub p: ComplexMatrix,
}

pub fn polar_decompose(m: &ComplexMatrix) -> Result<PolarDecomposition> {
    let n = ensure_square(m)?;
    ensure_finite(m)?;
    if n == 0 {
        return Ok(PolarDecomposition {
            w: m.clone(),
            p: m.clone(),
        });
    }
    let norm = fro(m);
    if norm == 0.0 {
        return Err(Error::SingularInput);
    }
    let inv = inverse(m)?;
    if norm * fro(&inv) > SINGULAR_COND {
        return Err(Error::SingularInput);
    }

    let mut x = m.clone();
    let mut x_inv = inv;
    let mut scaling = true;
    let mut converged = false;
    for _ in 0..MAX_ITER {
        let zeta = if scaling {
            (fro(&x_inv) / fro(&x)).sqrt()
        } else {
            1.0
        };
        let next = (x.scale(zeta) + x_inv.adjoint().scale(1.0 / zeta)).scale(0.5);
        let change = fro(&(&next - &x));
        x = next;
        if change <= 1e-2 {
            scaling = false;
        }
        if change <= 4.0 * f64::EPSILON * (n as f64).sqrt() {
            converged = true;
            break;
        }
        x_inv = inverse(&x)?;
    }
    if !converged {
        return Err(Error::NoConvergence("polar Newton iteration"));
    }
    let p = hermitian_part(&(x.adjoint() * m));
    Ok(PolarDecomposition { w: x, p })
}
