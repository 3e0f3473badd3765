//! Additional observables compatible with a metric, and the search for a
//! metric shared by two preselected operators.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::dyson::{DysonMap, Metric};
use crate::error::{Error, Result};
use crate::linalg::{
    c64, ensure_same_dim, ensure_square, fro, herm_eig, hermiticity_residual, off_diagonal_norm,
    ComplexMatrix,
};
use crate::tolerance::Tolerances;

/// `A = Θ⁻¹ M` for a Hermitian generator `M`.
#[derive(Debug, Clone)]
pub struct ObservableCandidate {
    pub a_matrix: ComplexMatrix,
    pub m_matrix: ComplexMatrix,
    /// Quasi-Hermiticity residual of `A` under the metric it was built from.
    pub residual: f64,
}

/// Builds the Θ-quasi-Hermitian observable `A = Θ⁻¹ M`.
///
/// `A† Θ = M = Θ A` holds by construction, and `A` is similar to the
/// Hermitian `Θ^{-1/2} M Θ^{-1/2}`, so its spectrum is real.
pub fn observable_from_m(
    metric: &Metric,
    m: &ComplexMatrix,
    tol: &Tolerances,
) -> Result<ObservableCandidate> {
    ensure_same_dim(metric.theta(), m)?;
    let residual = hermiticity_residual(m);
    let threshold = tol.residual_rel * fro(m);
    if residual > threshold {
        return Err(Error::NotHermitianGenerator {
            residual,
            threshold,
        });
    }
    let a = metric.solve(m)?;
    let residual = is_quasi_hermitian(&a, metric);
    Ok(ObservableCandidate {
        a_matrix: a,
        m_matrix: m.clone(),
        residual,
    })
}

/// `‖A†Θ − ΘA‖ / (‖A‖ ‖Θ‖)`; zero for `A = 0`.
pub fn is_quasi_hermitian(a: &ComplexMatrix, metric: &Metric) -> f64 {
    crate::dyson::quasi_hermiticity_residual(a, metric)
}

/// Hermitian avatar `Ω A Ω⁻¹` of an observable, evaluated through the map's
/// factors. Hermiticity of the result is not enforced.
pub fn avatar_of_observable(a: &ComplexMatrix, map: &DysonMap) -> Result<ComplexMatrix> {
    let n = ensure_square(a)?;
    if n != map.dimension() {
        return Err(Error::DimensionMismatch {
            expected: map.dimension(),
            actual: n,
        });
    }
    Ok(map.conjugate(a))
}

/// Whether `Ω_I A Ω_I⁻¹` is diagonal, i.e. `A` shares the eigenbasis of
/// the Hamiltonian that produced `Ω_I`. The map's `Ω_I` factor is used
/// whatever its family.
pub fn check_diagonal_center(a: &ComplexMatrix, map: &DysonMap, tol: &Tolerances) -> Result<bool> {
    let n = ensure_square(a)?;
    if n != map.dimension() {
        return Err(Error::DimensionMismatch {
            expected: map.dimension(),
            actual: n,
        });
    }
    let center = map.base() * a * map.base_inv();
    Ok(off_diagonal_norm(&center) <= tol.residual_rel * fro(a))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SharedMetricStatus {
    Found,
    NoSharedMetric,
    Inconclusive,
}

impl SharedMetricStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            SharedMetricStatus::Found => "Found",
            SharedMetricStatus::NoSharedMetric => "NoSharedMetric",
            SharedMetricStatus::Inconclusive => "Inconclusive",
        }
    }
}

#[derive(Debug, Clone)]
pub struct SharedMetricResult {
    pub status: SharedMetricStatus,
    /// Present iff `status == Found`; normalized to trace `N`.
    pub theta: Option<Metric>,
    /// Real dimension of `{Θ = Θ†, h1†Θ = Θh1, h2†Θ = Θh2}`.
    pub solution_space_dim: usize,
    /// Quasi-Hermiticity residuals of `h1` and `h2` under `theta`.
    pub residuals: Option<(f64, f64)>,
}

/// Singular values below this fraction of the largest count as zero.
const NULL_SPACE_REL: f64 = 1e-10;
const RANDOM_TRIALS: usize = 1000;
const ASCENT_STEPS: usize = 500;

/// Orthonormal (Frobenius) real basis of the `N²`-dimensional space of
/// Hermitian `N×N` matrices.
fn hermitian_basis(n: usize) -> Vec<ComplexMatrix> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut basis = Vec::with_capacity(n * n);
    for i in 0..n {
        let mut b = ComplexMatrix::zeros(n, n);
        b[(i, i)] = c64(1.0, 0.0);
        basis.push(b);
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let mut sym = ComplexMatrix::zeros(n, n);
            sym[(i, j)] = c64(r, 0.0);
            sym[(j, i)] = c64(r, 0.0);
            basis.push(sym);
            let mut anti = ComplexMatrix::zeros(n, n);
            anti[(i, j)] = c64(0.0, r);
            anti[(j, i)] = c64(0.0, -r);
            basis.push(anti);
        }
    }
    basis
}

/// Real null space of `Θ ↦ (h1†Θ − Θh1, h2†Θ − Θh2)` restricted to Hermitian
/// `Θ`, returned as Frobenius-orthonormal Hermitian matrices.
fn metric_solution_space(h1: &ComplexMatrix, h2: &ComplexMatrix) -> Vec<ComplexMatrix> {
    let n = h1.nrows();
    let basis = hermitian_basis(n);
    let dim = basis.len();
    let rows = 4 * n * n;
    let mut a = DMatrix::<f64>::zeros(rows, dim);
    for (k, b) in basis.iter().enumerate() {
        let mut row = 0;
        for h in [h1, h2] {
            let image = h.adjoint() * b - b * h;
            for z in image.iter() {
                a[(row, k)] = z.re;
                a[(row + 1, k)] = z.im;
                row += 2;
            }
        }
    }
    let svd = a.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let sigma_max = svd.singular_values.iter().copied().fold(0.0, f64::max);
    // The map's norm is at most 2(‖h1‖ + ‖h2‖); using it as a floor keeps
    // round-off in nearly Hermitian inputs from counting as rank.
    let reference = sigma_max.max(2.0 * (fro(h1) + fro(h2)));
    let cutoff = NULL_SPACE_REL * reference;
    let mut space = Vec::new();
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s <= cutoff {
            let coeffs = v_t.row(i);
            space.push(combine(&basis, coeffs.iter().copied()));
        }
    }
    space
}

fn combine(basis: &[ComplexMatrix], coeffs: impl Iterator<Item = f64>) -> ComplexMatrix {
    let n = basis[0].nrows();
    let mut out = ComplexMatrix::zeros(n, n);
    for (b, c) in basis.iter().zip(coeffs) {
        out += b.scale(c);
    }
    out
}

/// Smallest eigenvalue relative to the Frobenius norm.
fn relative_min_eig(theta: &ComplexMatrix) -> (f64, ComplexMatrix) {
    let norm = fro(theta);
    let (values, vectors) = herm_eig(theta);
    let min = values.first().copied().unwrap_or(0.0);
    let rel = if norm > 0.0 { min / norm } else { 0.0 };
    (rel, vectors)
}

/// Looks for a Hermitian positive-definite `Θ` making both `h1` and `h2`
/// quasi-Hermitian.
///
/// The solution space of the linear constraints is computed exactly (up to
/// the numerical rank cutoff); positivity is then searched for heuristically:
/// the projection of the identity, each basis direction with both signs,
/// seeded random combinations, and finally a projected supergradient ascent
/// on the smallest eigenvalue. `NoSharedMetric` is only reported when the
/// space is empty or one-dimensional with an indefinite generator.
pub fn shared_metric(
    h1: &ComplexMatrix,
    h2: &ComplexMatrix,
    tol: &Tolerances,
    seed: u64,
) -> Result<SharedMetricResult> {
    let n = ensure_same_dim(h1, h2)?;
    let space = metric_solution_space(h1, h2);
    let dim = space.len();
    let not_found = |status| SharedMetricResult {
        status,
        theta: None,
        solution_space_dim: dim,
        residuals: None,
    };
    if dim == 0 || n == 0 {
        return Ok(not_found(SharedMetricStatus::NoSharedMetric));
    }

    let accept = |candidate: &ComplexMatrix| -> Option<SharedMetricResult> {
        let (rel_min, _) = relative_min_eig(candidate);
        let signed = if rel_min > tol.positivity_rel {
            candidate.clone()
        } else {
            let (neg_min, _) = relative_min_eig(&(-candidate));
            if neg_min > tol.positivity_rel {
                -candidate
            } else {
                return None;
            }
        };
        let trace: f64 = (0..n).map(|i| signed[(i, i)].re).sum();
        let normalized = signed.scale(n as f64 / trace);
        let metric = Metric::new(normalized, tol).ok()?;
        let r1 = is_quasi_hermitian(h1, &metric);
        let r2 = is_quasi_hermitian(h2, &metric);
        if r1 > tol.residual_rel || r2 > tol.residual_rel {
            return None;
        }
        Some(SharedMetricResult {
            status: SharedMetricStatus::Found,
            theta: Some(metric),
            solution_space_dim: dim,
            residuals: Some((r1, r2)),
        })
    };

    // Projection of I/√N onto the space.
    let scale = 1.0 / (n as f64).sqrt();
    let coeffs: Vec<f64> = space
        .iter()
        .map(|b| scale * (0..n).map(|i| b[(i, i)].re).sum::<f64>())
        .collect();
    if coeffs.iter().any(|&c| c != 0.0) {
        if let Some(found) = accept(&combine(&space, coeffs.iter().copied())) {
            return Ok(found);
        }
    }

    for b in &space {
        if let Some(found) = accept(b) {
            return Ok(found);
        }
    }
    if dim == 1 {
        return Ok(not_found(SharedMetricStatus::NoSharedMetric));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = (f64::NEG_INFINITY, DVector::<f64>::zeros(dim));
    for _ in 0..RANDOM_TRIALS {
        let mut c = DVector::<f64>::from_fn(dim, |_, _| StandardNormal.sample(&mut rng));
        let nrm = c.norm();
        if nrm == 0.0 {
            continue;
        }
        c.unscale_mut(nrm);
        let candidate = combine(&space, c.iter().copied());
        if let Some(found) = accept(&candidate) {
            return Ok(found);
        }
        for sign in [1.0, -1.0] {
            let (rel, _) = relative_min_eig(&candidate.scale(sign));
            if rel > best.0 {
                best = (rel, c.scale(sign));
            }
        }
    }

    // λ_min is concave in the coefficients, so ascent on the unit ball
    // either reaches a positive value or stays stuck below zero.
    let mut c = best.1;
    for step in 0..ASCENT_STEPS {
        let candidate = combine(&space, c.iter().copied());
        if let Some(found) = accept(&candidate) {
            return Ok(found);
        }
        let (_, vectors) = relative_min_eig(&candidate);
        let u = vectors.column(0).into_owned();
        let grad = DVector::<f64>::from_iterator(dim, space.iter().map(|b| u.dotc(&(b * &u)).re));
        c += grad.scale(0.5 / (1.0 + step as f64).sqrt());
        let nrm = c.norm();
        if nrm == 0.0 {
            break;
        }
        c.unscale_mut(nrm);
    }
    Ok(not_found(SharedMetricStatus::Inconclusive))
}
