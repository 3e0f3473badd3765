//! Dyson maps, metrics and Hermitian avatars of a quasi-Hermitian `H`.
//!
//! Three families of maps are built from the biorthogonal eigenbasis of `H`:
//!
//! | family | map                 | avatar          | metric |
//! |--------|---------------------|-----------------|--------|
//! | `I`    | `Ω_I`               | `h_I` diagonal  | `Θ_I`  |
//! | `K`    | `K† Ω_I`            | `h_I`           | `Θ_K`  |
//! | `KU`   | `U K† Ω_I`          | `U h_I U†`      | `Θ_K`  |
//!
//! The rows of `Ω_I` are the left eigenvectors `⟨⟨ψ_n|` of `H`, and its
//! inverse is the matrix of right eigenvectors, so `Ω_I H Ω_I⁻¹` is the
//! diagonal matrix of energies.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    self, c64, eig_general, ensure_finite, ensure_same_dim, ensure_square, fro, herm_eig,
    herm_sqrt, hermitian_part, hermiticity_residual, polar_decompose, unitarity_residual,
    ComplexMatrix, ComplexVector,
};
use crate::tolerance::Tolerances;

/// Energies with their right kets `|ψ_n⟩` and left kets `|ψ_n⟩⟩`.
#[derive(Debug, Clone)]
pub struct BiorthogonalSystem {
    energies: Vec<f64>,
    right_kets: ComplexMatrix,
    left_kets: ComplexMatrix,
}

impl BiorthogonalSystem {
    pub fn dimension(&self) -> usize {
        self.energies.len()
    }

    /// Real energies, non-decreasing.
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    /// Columns are right eigenvectors of `H`.
    pub fn right_kets(&self) -> &ComplexMatrix {
        &self.right_kets
    }

    /// Columns are eigenvectors of `H†`, normalized so `left† right = I`.
    pub fn left_kets(&self) -> &ComplexMatrix {
        &self.left_kets
    }
}

/// Solves `H|ψ_n⟩ = E_n|ψ_n⟩` and `H†|ψ_n⟩⟩ = E_n|ψ_n⟩⟩` together and
/// certifies that the spectrum is real.
pub fn solve_schrodinger_pair(h: &ComplexMatrix, tol: &Tolerances) -> Result<BiorthogonalSystem> {
    ensure_square(h)?;
    ensure_finite(h)?;
    let eig = eig_general(h, tol)?;
    let threshold = tol.reality_rel * fro(h);
    let max_imag = eig
        .eigenvalues
        .iter()
        .map(|e| e.im.abs())
        .fold(0.0, f64::max);
    if max_imag > threshold {
        return Err(Error::ComplexSpectrum {
            max_imag,
            threshold,
        });
    }
    // Dropping the imaginary parts can swap members of a near-tie; re-sort
    // so the energies are non-decreasing.
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].re.total_cmp(&eig.eigenvalues[b].re));
    let energies = order.iter().map(|&i| eig.eigenvalues[i].re).collect();
    let right_kets = ComplexMatrix::from_fn(n, n, |r, c| eig.right_vectors[(r, order[c])]);
    let left_kets = ComplexMatrix::from_fn(n, n, |r, c| eig.left_vectors[(r, order[c])]);
    Ok(BiorthogonalSystem {
        energies,
        right_kets,
        left_kets,
    })
}

/// Classification tag of a Dyson map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// Eigenvector concatenation `Ω_I`.
    I,
    /// Diagonal rescaling `K† Ω_I`.
    K,
    /// Unitary rotation `U K† Ω_I`.
    KU,
    /// A map supplied directly rather than derived from an eigenbasis,
    /// e.g. the closed-form maps of the model zoo.
    External,
}

impl Family {
    pub fn as_str(&self) -> &'static str {
        match self {
            Family::I => "I",
            Family::K => "K",
            Family::KU => "KU",
            Family::External => "external",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// An invertible map `Ω` together with the factors it was built from.
///
/// For the `I`, `K` and `KU` families `omega = U · diag(conj k) · Ω_I` with
/// absent factors read as identities.
#[derive(Debug, Clone)]
pub struct DysonMap {
    omega: ComplexMatrix,
    omega_inv: ComplexMatrix,
    family: Family,
    k_diag: Option<Vec<Complex64>>,
    u_matrix: Option<ComplexMatrix>,
    base: ComplexMatrix,
    base_inv: ComplexMatrix,
}

impl DysonMap {
    /// Wraps an arbitrary invertible matrix. The inverse is computed
    /// numerically and checked against `residual_rel`.
    pub fn external(omega: ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        ensure_finite(&omega)?;
        let omega_inv = linalg::inverse(&omega)?;
        Self::external_with_inverse(omega, omega_inv, tol)
    }

    /// Wraps a map whose inverse is known in closed form.
    pub fn external_with_inverse(
        omega: ComplexMatrix,
        omega_inv: ComplexMatrix,
        tol: &Tolerances,
    ) -> Result<Self> {
        let n = ensure_same_dim(&omega, &omega_inv)?;
        let residual = fro(&(&omega * &omega_inv - linalg::identity(n)));
        if residual > tol.residual_rel * (n as f64).sqrt().max(1.0) {
            return Err(Error::SingularInput);
        }
        Ok(Self {
            base: omega.clone(),
            base_inv: omega_inv.clone(),
            omega,
            omega_inv,
            family: Family::External,
            k_diag: None,
            u_matrix: None,
        })
    }

    pub fn dimension(&self) -> usize {
        self.omega.nrows()
    }

    pub fn omega(&self) -> &ComplexMatrix {
        &self.omega
    }

    pub fn omega_inv(&self) -> &ComplexMatrix {
        &self.omega_inv
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn k_diag(&self) -> Option<&[Complex64]> {
        self.k_diag.as_deref()
    }

    pub fn u_matrix(&self) -> Option<&ComplexMatrix> {
        self.u_matrix.as_ref()
    }

    /// The underlying `Ω_I` (or the map itself for external maps).
    pub fn base(&self) -> &ComplexMatrix {
        &self.base
    }

    pub fn base_inv(&self) -> &ComplexMatrix {
        &self.base_inv
    }

    /// `Ω X Ω⁻¹`, evaluated through the stored factors
    /// `U K† (Ω_I X Ω_I⁻¹) (K†)⁻¹ U†`.
    pub fn conjugate(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let mut center = &self.base * x * &self.base_inv;
        if let Some(k) = &self.k_diag {
            scale_by_k(&mut center, k);
        }
        match &self.u_matrix {
            Some(u) => u * center * u.adjoint(),
            None => center,
        }
    }
}

/// In-place `K† C (K†)⁻¹` for diagonal `K`.
fn scale_by_k(center: &mut ComplexMatrix, k: &[Complex64]) {
    for j in 0..center.ncols() {
        for i in 0..center.nrows() {
            center[(i, j)] *= k[i].conj() / k[j].conj();
        }
    }
}

/// `Ω_I = (left kets)†`, with `Ω_I⁻¹` the matrix of right kets.
pub fn build_omega_i(sys: &BiorthogonalSystem) -> DysonMap {
    let omega = sys.left_kets.adjoint();
    let omega_inv = sys.right_kets.clone();
    DysonMap {
        base: omega.clone(),
        base_inv: omega_inv.clone(),
        omega,
        omega_inv,
        family: Family::I,
        k_diag: None,
        u_matrix: None,
    }
}

/// `Ω_K = K† Ω_I` for diagonal `K = diag(k)`.
pub fn build_omega_k(base: &DysonMap, k: &[Complex64], tol: &Tolerances) -> Result<DysonMap> {
    if base.family != Family::I {
        return Err(Error::InvalidParameter(format!(
            "K-rescaling needs an I-family base map, got {}",
            base.family
        )));
    }
    let n = base.dimension();
    if k.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: k.len(),
        });
    }
    for (index, z) in k.iter().enumerate() {
        let magnitude = z.norm();
        if !(magnitude > tol.positivity_rel) || !magnitude.is_finite() {
            return Err(Error::SingularScaling { index, magnitude });
        }
    }
    let mut omega = base.omega.clone();
    let mut omega_inv = base.omega_inv.clone();
    for (i, z) in k.iter().enumerate() {
        let kc = z.conj();
        omega.row_mut(i).iter_mut().for_each(|w| *w *= kc);
        omega_inv.column_mut(i).iter_mut().for_each(|w| *w /= kc);
    }
    Ok(DysonMap {
        omega,
        omega_inv,
        family: Family::K,
        k_diag: Some(k.to_vec()),
        u_matrix: None,
        base: base.base.clone(),
        base_inv: base.base_inv.clone(),
    })
}

/// `Ω_{K,U} = U Ω_K` for unitary `U`.
pub fn build_omega_ku(base: &DysonMap, u: &ComplexMatrix, tol: &Tolerances) -> Result<DysonMap> {
    if !matches!(base.family, Family::I | Family::K) {
        return Err(Error::InvalidParameter(format!(
            "unitary rotation needs an I- or K-family base map, got {}",
            base.family
        )));
    }
    let n = base.dimension();
    let un = ensure_square(u)?;
    if un != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: un,
        });
    }
    let residual = unitarity_residual(u);
    if residual > tol.residual_rel {
        return Err(Error::NotUnitary {
            residual,
            threshold: tol.residual_rel,
        });
    }
    Ok(DysonMap {
        omega: u * &base.omega,
        omega_inv: &base.omega_inv * u.adjoint(),
        family: Family::KU,
        k_diag: base.k_diag.clone(),
        u_matrix: Some(u.clone()),
        base: base.base.clone(),
        base_inv: base.base_inv.clone(),
    })
}

/// Hermitian positive-definite metric with its cached square root.
#[derive(Debug, Clone)]
pub struct Metric {
    theta: ComplexMatrix,
    sqrt_theta: ComplexMatrix,
    min_eigenvalue: f64,
    max_eigenvalue: f64,
}

impl Metric {
    /// Certifies `theta` as Hermitian positive definite.
    pub fn new(theta: ComplexMatrix, tol: &Tolerances) -> Result<Self> {
        let sqrt_theta = herm_sqrt(&theta, tol)?;
        let theta = hermitian_part(&theta);
        let (values, _) = herm_eig(&theta);
        Ok(Self {
            min_eigenvalue: values.first().copied().unwrap_or(1.0),
            max_eigenvalue: values.last().copied().unwrap_or(1.0),
            theta,
            sqrt_theta,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            theta: linalg::identity(n),
            sqrt_theta: linalg::identity(n),
            min_eigenvalue: 1.0,
            max_eigenvalue: 1.0,
        }
    }

    pub fn dimension(&self) -> usize {
        self.theta.nrows()
    }

    pub fn theta(&self) -> &ComplexMatrix {
        &self.theta
    }

    pub fn sqrt_theta(&self) -> &ComplexMatrix {
        &self.sqrt_theta
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.min_eigenvalue
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.max_eigenvalue
    }

    /// Spectral condition number `λ_max / λ_min`.
    pub fn condition(&self) -> f64 {
        self.max_eigenvalue / self.min_eigenvalue
    }

    /// `Θ⁻¹ X` through the LU factorization of `Θ`.
    pub fn solve(&self, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.theta.clone().lu().solve(x).ok_or(Error::SingularInput)
    }
}

/// `Θ = Ω†Ω`.
pub fn metric_of(map: &DysonMap, tol: &Tolerances) -> Result<Metric> {
    Metric::new(map.omega.adjoint() * &map.omega, tol)
}

/// `h = Ω H Ω⁻¹`, certified Hermitian.
pub fn hermitian_avatar(
    h: &ComplexMatrix,
    map: &DysonMap,
    tol: &Tolerances,
) -> Result<ComplexMatrix> {
    let n = ensure_square(h)?;
    if n != map.dimension() {
        return Err(Error::DimensionMismatch {
            expected: map.dimension(),
            actual: n,
        });
    }
    let avatar = map.conjugate(h);
    let residual = hermiticity_residual(&avatar);
    let threshold = tol.residual_rel * fro(&avatar);
    if residual > threshold {
        return Err(Error::AvatarNotHermitian {
            residual,
            threshold,
        });
    }
    Ok(avatar)
}

/// `‖H†Θ − ΘH‖ / (‖H‖ ‖Θ‖)`; zero for `H = 0`.
pub fn quasi_hermiticity_residual(h: &ComplexMatrix, metric: &Metric) -> f64 {
    let theta = metric.theta();
    let denom = fro(h) * fro(theta);
    if denom == 0.0 {
        return 0.0;
    }
    fro(&(h.adjoint() * theta - theta * h)) / denom
}

/// Unitary `u` and Hermitian `omega_herm = u Ω_K = Θ_K^{1/2}`.
#[derive(Debug, Clone)]
pub struct HermitianDyson {
    pub u: ComplexMatrix,
    pub omega_herm: ComplexMatrix,
}

/// Solves `U Ω_K U = Ω_K†` from the right polar factorization `Ω_K = W P`
/// by taking `U = W†`.
pub fn hermitian_dyson(map: &DysonMap) -> Result<HermitianDyson> {
    let polar = polar_decompose(&map.omega)?;
    Ok(HermitianDyson {
        u: polar.w.adjoint(),
        omega_herm: polar.p,
    })
}

/// `(ψ, φ)_phys = ⟨ψ|Θ|φ⟩`.
pub fn phys_inner(metric: &Metric, psi: &ComplexVector, phi: &ComplexVector) -> Result<Complex64> {
    let n = metric.dimension();
    for v in [psi, phi] {
        if v.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: v.len(),
            });
        }
    }
    Ok(psi.dotc(&(metric.theta() * phi)))
}

/// `⟨ψ(t)|W|ψ(t)⟩` for `ψ(t) = exp(−iHt) ψ0`, with the propagator taken from
/// the eigendecomposition of `H`. No quasi-Hermiticity check is made, so any
/// Hermitian weight (including the identity) can be tracked.
pub fn weighted_norm_trajectory(
    h: &ComplexMatrix,
    weight: &ComplexMatrix,
    psi0: &ComplexVector,
    times: &[f64],
    tol: &Tolerances,
) -> Result<Vec<f64>> {
    let n = ensure_same_dim(h, weight)?;
    if psi0.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: psi0.len(),
        });
    }
    let eig = eig_general(h, tol)?;
    let coeffs = eig.left_vectors.adjoint() * psi0;
    Ok(times
        .iter()
        .map(|&t| {
            let phased = ComplexVector::from_iterator(
                n,
                coeffs
                    .iter()
                    .zip(&eig.eigenvalues)
                    .map(|(c, e)| c * (c64(0.0, -t) * e).exp()),
            );
            let psi = &eig.right_vectors * phased;
            psi.dotc(&(weight * &psi)).re
        })
        .collect())
}

/// Θ-norms `(ψ(t), Θ ψ(t))` along the evolution generated by a
/// Θ-quasi-Hermitian `H`; these are constant when the pair is consistent.
pub fn evolve_norm_check(
    h: &ComplexMatrix,
    metric: &Metric,
    psi0: &ComplexVector,
    times: &[f64],
    tol: &Tolerances,
) -> Result<Vec<f64>> {
    ensure_same_dim(h, metric.theta())?;
    let residual = quasi_hermiticity_residual(h, metric);
    if residual > tol.residual_rel {
        return Err(Error::NotQuasiHermitian {
            residual,
            threshold: tol.residual_rel,
        });
    }
    weighted_norm_trajectory(h, metric.theta(), psi0, times, tol)
}

/// Which Dyson map the hermitization pipeline should use.
#[derive(Debug, Clone, Default)]
pub struct HermitizeOptions {
    /// Rescale `Ω_I` by `K = diag(k)`.
    pub k_diag: Option<Vec<Complex64>>,
    /// Rotate onto the Hermitian square root of the metric.
    pub hermitian_omega: bool,
}

/// Outcome of the full hermitization pipeline for one Hamiltonian.
#[derive(Debug, Clone)]
pub struct HermitizationReport {
    pub energies: Vec<f64>,
    pub family: Family,
    /// `‖H†Θ − ΘH‖ / (‖H‖‖Θ‖)`.
    pub residual_quasi_herm: f64,
    /// `‖h − h†‖ / ‖h‖`.
    pub residual_avatar_herm: f64,
    /// Largest gap between sorted spectra of `H` and `h`, relative to `‖H‖`.
    pub residual_isospectral: f64,
    pub metric_condition: f64,
    pub passed: bool,
    pub metric: ComplexMatrix,
    pub avatar: ComplexMatrix,
    pub omega: ComplexMatrix,
    pub tolerances: Tolerances,
}

/// Relative distance between the energies and the spectrum of `avatar`.
pub fn isospectral_residual(energies: &[f64], avatar: &ComplexMatrix, scale: f64) -> f64 {
    let (values, _) = herm_eig(avatar);
    let gap = energies
        .iter()
        .zip(&values)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    if scale > 0.0 {
        gap / scale
    } else {
        gap
    }
}

/// Biorthogonal solve, Dyson map, metric and avatar for `h`, with every
/// residual measured and compared against `tol`.
pub fn hermitize(
    h: &ComplexMatrix,
    options: &HermitizeOptions,
    tol: &Tolerances,
) -> Result<HermitizationReport> {
    tol.validate()?;
    let sys = solve_schrodinger_pair(h, tol)?;
    let mut map = build_omega_i(&sys);
    if let Some(k) = &options.k_diag {
        map = build_omega_k(&map, k, tol)?;
    }
    if options.hermitian_omega {
        let hd = hermitian_dyson(&map)?;
        map = build_omega_ku(&map, &hd.u, tol)?;
    }
    let metric = metric_of(&map, tol)?;
    let avatar = hermitian_avatar(h, &map, tol)?;

    let norm_h = fro(h);
    let residual_quasi_herm = quasi_hermiticity_residual(h, &metric);
    let residual_avatar_herm = if fro(&avatar) > 0.0 {
        hermiticity_residual(&avatar) / fro(&avatar)
    } else {
        0.0
    };
    let residual_isospectral = isospectral_residual(sys.energies(), &avatar, norm_h);
    let passed = residual_quasi_herm <= tol.residual_rel
        && residual_avatar_herm <= tol.residual_rel
        && residual_isospectral <= tol.reality_rel;
    Ok(HermitizationReport {
        energies: sys.energies().to_vec(),
        family: map.family(),
        residual_quasi_herm,
        residual_avatar_herm,
        residual_isospectral,
        metric_condition: metric.condition(),
        passed,
        metric: metric.theta().clone(),
        avatar,
        omega: map.omega().clone(),
        tolerances: *tol,
    })
}
