//! Complex Schur decomposition `A = Q T Q†` by Hessenberg reduction followed
//! by single-shift implicit QR sweeps with Wilkinson shifts.

use nalgebra::linalg::Hessenberg;
use num_complex::Complex64;

use super::{ensure_finite, ensure_square, fro, ComplexMatrix};
use crate::error::{Error, Result};

const MAX_SWEEPS_PER_EIGENVALUE: usize = 60;

/// Unitary `q` and upper-triangular `t` with `A = q t q†`.
#[derive(Debug, Clone)]
pub struct ComplexSchur {
    pub q: ComplexMatrix,
    pub t: ComplexMatrix,
}

#[inline]
fn cabs1(z: Complex64) -> f64 {
    z.re.abs() + z.im.abs()
}

/// Rotation `[[c, s], [−s̄, c]]` mapping `(x, y)` onto `(r, 0)`.
fn givens(x: Complex64, y: Complex64) -> (f64, Complex64) {
    let ay = y.norm();
    if ay == 0.0 {
        return (1.0, Complex64::new(0.0, 0.0));
    }
    let ax = x.norm();
    if ax == 0.0 {
        return (0.0, y.conj() / ay);
    }
    let nrm = ax.hypot(ay);
    (ax / nrm, (x / ax) * y.conj() / nrm)
}

/// Eigenvalue of `[[a, b], [c, d]]` closest to `d`.
fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let l1 = d + half + disc;
    let l2 = d + half - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

pub fn complex_schur(a: &ComplexMatrix) -> Result<ComplexSchur> {
    let n = ensure_square(a)?;
    ensure_finite(a)?;
    if n == 0 {
        return Ok(ComplexSchur {
            q: ComplexMatrix::zeros(0, 0),
            t: ComplexMatrix::zeros(0, 0),
        });
    }
    let (mut q, mut h) = if n > 2 {
        Hessenberg::new(a.clone()).unpack()
    } else {
        (ComplexMatrix::identity(n, n), a.clone())
    };
    // Entries below the first subdiagonal are exactly zero from here on.
    for j in 0..n {
        for i in (j + 2)..n {
            h[(i, j)] = Complex64::new(0.0, 0.0);
        }
    }

    let anorm = fro(&h);
    if anorm == 0.0 {
        return Ok(ComplexSchur { q, t: h });
    }
    let eps = f64::EPSILON;
    let small = f64::MIN_POSITIVE * (n as f64) / eps;

    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    while hi > 0 {
        // Locate the start of the active unreduced block.
        let mut lo = hi;
        while lo > 0 {
            let sub = cabs1(h[(lo, lo - 1)]);
            let mut scale = cabs1(h[(lo - 1, lo - 1)]) + cabs1(h[(lo, lo)]);
            if scale == 0.0 {
                scale = anorm;
            }
            if sub <= eps * scale || sub <= small {
                h[(lo, lo - 1)] = Complex64::new(0.0, 0.0);
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            iter = 0;
            continue;
        }

        iter += 1;
        total += 1;
        if total > MAX_SWEEPS_PER_EIGENVALUE * n {
            return Err(Error::NoConvergence("complex Schur QR iteration"));
        }

        let shift = if iter.is_multiple_of(10) {
            // Exceptional shift to break cycles.
            h[(hi, hi)] + Complex64::new(0.75 * cabs1(h[(hi, hi - 1)]), 0.0)
        } else {
            wilkinson_shift(
                h[(hi - 1, hi - 1)],
                h[(hi - 1, hi)],
                h[(hi, hi - 1)],
                h[(hi, hi)],
            )
        };

        for k in lo..hi {
            let (x, y) = if k == lo {
                (h[(lo, lo)] - shift, h[(lo + 1, lo)])
            } else {
                (h[(k, k - 1)], h[(k + 1, k - 1)])
            };
            let (c, s) = givens(x, y);
            let first_col = if k == lo { lo } else { k - 1 };
            for j in first_col..n {
                let t1 = h[(k, j)];
                let t2 = h[(k + 1, j)];
                h[(k, j)] = t1 * c + s * t2;
                h[(k + 1, j)] = -s.conj() * t1 + t2 * c;
            }
            if k > lo {
                h[(k + 1, k - 1)] = Complex64::new(0.0, 0.0);
            }
            let last_row = (k + 2).min(hi);
            for i in 0..=last_row {
                let t1 = h[(i, k)];
                let t2 = h[(i, k + 1)];
                h[(i, k)] = t1 * c + s.conj() * t2;
                h[(i, k + 1)] = -s * t1 + t2 * c;
            }
            for i in 0..n {
                let t1 = q[(i, k)];
                let t2 = q[(i, k + 1)];
                q[(i, k)] = t1 * c + s.conj() * t2;
                q[(i, k + 1)] = -s * t1 + t2 * c;
            }
        }
    }

    for j in 0..n {
        for i in (j + 1)..n {
            h[(i, j)] = Complex64::new(0.0, 0.0);
        }
    }
    Ok(ComplexSchur { q, t: h })
}
