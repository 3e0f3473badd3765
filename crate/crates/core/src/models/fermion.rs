use crate::dyson::DysonMap;
use crate::error::{Error, Result};
use crate::linalg::{c64, from_real_rows, inverse, ComplexMatrix};
use crate::tolerance::Tolerances;

/// `H = ω c₁†c₁ + (1−ω) c₂†c₂ + β c₁†c₂† + α c₂c₁` on the four-dimensional
/// Fock space ordered `|0⟩, c₁†|0⟩, c₂†|0⟩, c₁†c₂†|0⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FermionicParams {
    pub alpha: f64,
    pub beta: f64,
    pub omega: f64,
    pub sqrt_ab: f64,
    /// `det Ω⁻¹ = 2αβ − (α+β)√(αβ) + 1`
    pub det_d: f64,
}

impl FermionicParams {
    pub fn new(alpha: f64, beta: f64, omega: f64, tol: &Tolerances) -> Result<Self> {
        if !(alpha.is_finite() && beta.is_finite()) {
            return Err(Error::InvalidParameter(
                "alpha and beta must be finite".into(),
            ));
        }
        if !(omega > 0.0 && omega < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "omega must lie in (0, 1), got {omega}"
            )));
        }
        let ab = alpha * beta;
        if !(ab > 0.0) {
            return Err(Error::InvalidCoupling(format!(
                "alpha*beta must be positive, got {ab}"
            )));
        }
        let sqrt_ab = ab.sqrt();
        let det_d = 2.0 * ab - (alpha + beta) * sqrt_ab + 1.0;
        if det_d.abs() <= tol.positivity_rel {
            return Err(Error::SingularDysonMap { det: det_d });
        }
        Ok(Self {
            alpha,
            beta,
            omega,
            sqrt_ab,
            det_d,
        })
    }
}

#[derive(Debug, Clone)]
pub struct FermionicModel {
    pub params: FermionicParams,
    pub hamiltonian: ComplexMatrix,
    /// Hermitian twin with `√(αβ)` in both corners.
    pub h: ComplexMatrix,
    pub omega_inv: ComplexMatrix,
    pub omega: ComplexMatrix,
    pub theta: ComplexMatrix,
}

impl FermionicModel {
    pub fn dyson_map(&self, tol: &Tolerances) -> Result<DysonMap> {
        DysonMap::external_with_inverse(self.omega.clone(), self.omega_inv.clone(), tol)
    }
}

fn corner_matrix(a14: f64, a41: f64, omega: f64, a44: f64) -> ComplexMatrix {
    #[rustfmt::skip]
    let m = from_real_rows(4, 4, &[
        0.0, 0.0, 0.0, a14,
        0.0, omega, 0.0, 0.0,
        0.0, 0.0, 1.0 - omega, 0.0,
        a41, 0.0, 0.0, a44,
    ]);
    m
}

pub fn fermionic_build(p: &FermionicParams) -> Result<FermionicModel> {
    let (a, b, s, d) = (p.alpha, p.beta, p.sqrt_ab, p.det_d);
    let hamiltonian = corner_matrix(a, b, p.omega, 1.0);
    let h = corner_matrix(s, s, p.omega, 1.0);

    #[rustfmt::skip]
    let omega_inv = from_real_rows(4, 4, &[
        1.0, 0.0, 0.0, a - s,
        0.0, 1.0, 0.0, 0.0,
        0.0, 0.0, 1.0, 0.0,
        s - b, 0.0, 0.0, 1.0,
    ]);
    let omega = inverse(&omega_inv)?;

    let d2 = d * d;
    #[rustfmt::skip]
    let theta = from_real_rows(4, 4, &[
        ((b - s).powi(2) + 1.0) / d2, 0.0, 0.0, (b - a) / d2,
        0.0, 1.0, 0.0, 0.0,
        0.0, 0.0, 1.0, 0.0,
        (b - a) / d2, 0.0, 0.0, ((a - s).powi(2) + 1.0) / d2,
    ]);
    Ok(FermionicModel {
        params: *p,
        hamiltonian,
        h,
        omega_inv,
        omega,
        theta,
    })
}

/// `(c₁, c₂)` in the ordered basis `|0⟩, c₁†|0⟩, c₂†|0⟩, c₁†c₂†|0⟩`.
///
/// `c₂†` acting on `c₁†|0⟩` gives `c₂†c₁†|0⟩ = −|4⟩`, hence the sign.
pub fn annihilation_operators() -> (ComplexMatrix, ComplexMatrix) {
    let mut c1_dag = ComplexMatrix::zeros(4, 4);
    c1_dag[(1, 0)] = c64(1.0, 0.0);
    c1_dag[(3, 2)] = c64(1.0, 0.0);
    let mut c2_dag = ComplexMatrix::zeros(4, 4);
    c2_dag[(2, 0)] = c64(1.0, 0.0);
    c2_dag[(3, 1)] = c64(-1.0, 0.0);
    (c1_dag.adjoint(), c2_dag.adjoint())
}

/// Assembles `H` from the second-quantized expression.
pub fn fermionic_from_fock(p: &FermionicParams) -> ComplexMatrix {
    let (c1, c2) = annihilation_operators();
    let (c1d, c2d) = (c1.adjoint(), c2.adjoint());
    (&c1d * &c1).scale(p.omega)
        + (&c2d * &c2).scale(1.0 - p.omega)
        + (&c1d * &c2d).scale(p.beta)
        + (&c2 * &c1).scale(p.alpha)
}
