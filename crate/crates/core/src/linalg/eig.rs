use num_complex::Complex64;

use super::{complex_schur, condition_number, ensure_square, fro, inverse, ComplexMatrix};
use crate::error::{Error, Result};
use crate::tolerance::Tolerances;

/// Right and left eigenvectors of a diagonalizable matrix.
///
/// Column `n` of `right_vectors` solves `M v = E_n v`, column `n` of
/// `left_vectors` solves `M† w = conj(E_n) w`, and `w_n† v_m = δ_nm`.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<Complex64>,
    pub right_vectors: ComplexMatrix,
    pub left_vectors: ComplexMatrix,
    /// 2-norm condition number of `right_vectors`.
    pub condition: f64,
}

/// Relative gap below which two real parts are considered tied when ordering.
const TIE_REL: f64 = 1e-12;

/// Eigenvalues and unit right eigenvectors, without any defectiveness check.
///
/// Eigenvalues are ordered ascending by real part, ties broken ascending by
/// imaginary part. Each vector has unit norm and its largest-magnitude
/// component is real positive.
pub fn right_eigensystem(m: &ComplexMatrix) -> Result<(Vec<Complex64>, ComplexMatrix)> {
    let n = ensure_square(m)?;
    let schur = complex_schur(m)?;
    let t = &schur.t;
    let smin = (f64::EPSILON * fro(t)).max(f64::MIN_POSITIVE);

    let mut vecs = ComplexMatrix::zeros(n, n);
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for k in 0..n {
        let lambda = t[(k, k)];
        x.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
        x[k] = Complex64::new(1.0, 0.0);
        for i in (0..k).rev() {
            let mut s = Complex64::new(0.0, 0.0);
            for j in (i + 1)..=k {
                s += t[(i, j)] * x[j];
            }
            let mut d = t[(i, i)] - lambda;
            if d.norm() < smin {
                d = Complex64::new(smin, 0.0);
            }
            x[i] = -s / d;
            // Keep the partial solution representable near coalescing eigenvalues.
            let big = x[i..=k].iter().fold(0.0f64, |acc, z| acc.max(z.norm()));
            if big > 1e100 {
                for z in &mut x[i..=k] {
                    *z /= big;
                }
            }
        }
        let y = schur.q.columns(0, k + 1) * nalgebra::DVector::from_column_slice(&x[..=k]);
        vecs.set_column(k, &normalize_phase(y));
    }

    let values: Vec<Complex64> = (0..n).map(|k| t[(k, k)]).collect();
    let order = ordering(&values, fro(m));
    let sorted_values = order.iter().map(|&i| values[i]).collect();
    let sorted_vecs = ComplexMatrix::from_fn(n, n, |r, c| vecs[(r, order[c])]);
    Ok((sorted_values, sorted_vecs))
}

fn normalize_phase(mut v: nalgebra::DVector<Complex64>) -> nalgebra::DVector<Complex64> {
    let nrm = v.norm();
    if nrm == 0.0 {
        return v;
    }
    v.unscale_mut(nrm);
    let max = v.iter().fold(0.0f64, |acc, z| acc.max(z.norm()));
    let pivot = v
        .iter()
        .position(|z| z.norm() >= (1.0 - 1e-12) * max)
        .unwrap_or(0);
    let mag = v[pivot].norm();
    let phase = v[pivot].conj() / mag;
    v.iter_mut().for_each(|z| *z *= phase);
    v[pivot] = Complex64::new(v[pivot].re, 0.0);
    v
}

/// Ascending by real part; real parts within `TIE_REL·scale` form a tie
/// group that is ordered by imaginary part.
fn ordering(values: &[Complex64], scale: f64) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].re.total_cmp(&values[b].re));
    let tie = TIE_REL * scale.max(f64::MIN_POSITIVE);
    let mut start = 0;
    while start < idx.len() {
        let anchor = values[idx[start]].re;
        let mut end = start + 1;
        while end < idx.len() && values[idx[end]].re - anchor <= tie {
            end += 1;
        }
        idx[start..end].sort_by(|&a, &b| values[a].im.total_cmp(&values[b].im));
        start = end;
    }
    idx
}

/// Condition number of an eigenvector matrix; infinite when singular.
pub fn eigvec_condition(right_vectors: &ComplexMatrix) -> f64 {
    if right_vectors.is_empty() {
        return 1.0;
    }
    condition_number(right_vectors)
}

/// Full biorthogonal eigendecomposition of a square matrix.
///
/// Fails with `DefectiveMatrix` when the eigenvector matrix is too
/// ill-conditioned to be trusted, which is how proximity to an exceptional
/// point shows up numerically.
pub fn eig_general(m: &ComplexMatrix, tol: &Tolerances) -> Result<EigenDecomposition> {
    let (eigenvalues, right) = right_eigensystem(m)?;
    let condition = eigvec_condition(&right);
    if !(condition <= tol.defective_cond) {
        return Err(Error::DefectiveMatrix {
            condition,
            threshold: tol.defective_cond,
        });
    }
    let mut left = inverse(&right)
        .map_err(|_| Error::DefectiveMatrix {
            condition: f64::INFINITY,
            threshold: tol.defective_cond,
        })?
        .adjoint();
    for k in 0..left.ncols() {
        let overlap = left.column(k).dotc(&right.column(k));
        let fix = Complex64::new(1.0, 0.0) / overlap.conj();
        left.column_mut(k).iter_mut().for_each(|z| *z *= fix);
    }
    Ok(EigenDecomposition {
        eigenvalues,
        right_vectors: right,
        left_vectors: left,
        condition,
    })
}

#[cfg(test)]
mod tests {
    use super::super::{c64, from_rows, identity, off_diagonal_norm};
    use super::*;

    fn dimer(kappa: f64, gamma: f64) -> ComplexMatrix {
        from_rows(
            2,
            2,
            &[
                c64(0.0, gamma),
                c64(kappa, 0.0),
                c64(kappa, 0.0),
                c64(0.0, -gamma),
            ],
        )
    }

    #[test]
    fn dimer_eigenvalues_are_plus_minus_one() {
        // λ² − (κ² − γ²) = 0 with κ² − γ² = 1.
        let e = eig_general(&dimer(1.25, 0.75), &Tolerances::default()).unwrap();
        assert!((e.eigenvalues[0] - c64(-1.0, 0.0)).norm() < 1e-14);
        assert!((e.eigenvalues[1] - c64(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn identity_has_identity_eigenvectors() {
        let e = eig_general(&identity(2), &Tolerances::default()).unwrap();
        assert_eq!(e.eigenvalues, vec![c64(1.0, 0.0); 2]);
        assert!(fro(&(&e.right_vectors - identity(2))) < 1e-15);
    }

    #[test]
    fn exceptional_point_is_defective() {
        let err = eig_general(&dimer(1.0, 1.0), &Tolerances::default()).unwrap_err();
        assert!(matches!(err, Error::DefectiveMatrix { .. }), "{err:?}");
    }

    #[test]
    fn jordan_block_is_defective() {
        let j = from_rows(
            2,
            2,
            &[c64(3.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0), c64(3.0, 0.0)],
        );
        assert!(matches!(
            eig_general(&j, &Tolerances::default()),
            Err(Error::DefectiveMatrix { .. })
        ));
    }

    #[test]
    fn ordering_breaks_ties_by_imaginary_part() {
        let rot = from_rows(
            2,
            2,
            &[c64(0.0, 0.0), c64(1.0, 0.0), c64(-1.0, 0.0), c64(0.0, 0.0)],
        );
        let e = eig_general(&rot, &Tolerances::default()).unwrap();
        assert!(e.eigenvalues[0].im < 0.0 && e.eigenvalues[1].im > 0.0);
    }

    #[test]
    fn phase_convention() {
        let e = eig_general(&dimer(1.25, 0.75), &Tolerances::default()).unwrap();
        for k in 0..2 {
            let col = e.right_vectors.column(k);
            assert!((col.norm() - 1.0).abs() < 1e-15);
            let max = col.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let pivot = col
                .iter()
                .find(|z| z.norm() >= (1.0 - 1e-12) * max)
                .unwrap();
            assert_eq!(pivot.im, 0.0);
            assert!(pivot.re > 0.0);
        }
    }

    #[test]
    fn biorthonormal_pairs() {
        let e = eig_general(&dimer(1.25, 0.75), &Tolerances::default()).unwrap();
        let overlap = e.left_vectors.adjoint() * &e.right_vectors;
        assert!(off_diagonal_norm(&overlap) < 1e-14);
        for k in 0..2 {
            assert!((overlap[(k, k)] - c64(1.0, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn ordering_groups_ties() {
        let v = [c64(1.0, 2.0), c64(0.0, 1.0), c64(1.0, -1.0), c64(-3.0, 0.0)];
        assert_eq!(ordering(&v, 1.0), vec![3, 1, 2, 0]);
    }
}
