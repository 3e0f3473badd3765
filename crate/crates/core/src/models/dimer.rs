use crate::dyson::DysonMap;
use crate::error::{Error, Result};
use crate::linalg::{c64, fro, identity, ComplexMatrix};
use crate::tolerance::Tolerances;

use super::{sigma_x, sigma_y, sigma_z};

/// Parameters of `H = κσ_x + iγσ_z` with `κ = ω cosh α`, `γ = ω sinh α`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimerParams {
    pub omega: f64,
    pub alpha: f64,
    pub kappa: f64,
    pub gamma: f64,
}

impl DimerParams {
    pub fn new(omega: f64, alpha: f64) -> Result<Self> {
        if !(omega.is_finite() && omega > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "omega must be positive, got {omega}"
            )));
        }
        if !alpha.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "alpha must be finite, got {alpha}"
            )));
        }
        Ok(Self {
            omega,
            alpha,
            kappa: omega * alpha.cosh(),
            gamma: omega * alpha.sinh(),
        })
    }

    /// Checks `κ² − γ² = ω²`, `tanh α = γ/κ` and `|γ| < κ`.
    pub fn validate(&self, tol: &Tolerances) -> Result<()> {
        if !(self.gamma.abs() < self.kappa) {
            return Err(Error::EpRegion {
                kappa: self.kappa,
                gamma_abs: self.gamma.abs(),
            });
        }
        let w2 = self.omega * self.omega;
        let mismatch = (self.kappa * self.kappa - self.gamma * self.gamma - w2).abs();
        if mismatch > tol.residual_rel * (self.kappa * self.kappa).max(w2) {
            return Err(Error::InvalidParameter(format!(
                "kappa^2 - gamma^2 = {} differs from omega^2 = {w2}",
                self.kappa * self.kappa - self.gamma * self.gamma
            )));
        }
        let ratio = self.gamma / self.kappa;
        if (self.alpha.tanh() - ratio).abs() > tol.residual_rel.max(f64::EPSILON * 4.0) {
            return Err(Error::InvalidParameter(format!(
                "tanh(alpha) = {} differs from gamma/kappa = {ratio}",
                self.alpha.tanh()
            )));
        }
        Ok(())
    }
}

/// `ω = √(κ² − γ²)`, `α = atanh(γ/κ)`.
pub fn dimer_from_coupling(kappa: f64, gamma: f64) -> Result<DimerParams> {
    if !(kappa.is_finite() && kappa > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "kappa must be positive, got {kappa}"
        )));
    }
    if !gamma.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "gamma must be finite, got {gamma}"
        )));
    }
    if gamma.abs() >= kappa {
        return Err(Error::EpRegion {
            kappa,
            gamma_abs: gamma.abs(),
        });
    }
    Ok(DimerParams {
        omega: ((kappa - gamma) * (kappa + gamma)).sqrt(),
        alpha: (gamma / kappa).atanh(),
        kappa,
        gamma,
    })
}

/// All matrices of the dimer, built without any eigensolver.
#[derive(Debug, Clone)]
pub struct DimerModel {
    pub params: DimerParams,
    /// `ωσ_x`
    pub h: ComplexMatrix,
    /// `e^{(α/2)σ_y}`
    pub omega: ComplexMatrix,
    /// `e^{−(α/2)σ_y}`
    pub omega_inv: ComplexMatrix,
    /// `κσ_x + iγσ_z`
    pub hamiltonian: ComplexMatrix,
    /// `e^{ασ_y}`
    pub theta: ComplexMatrix,
}

impl DimerModel {
    pub fn dyson_map(&self, tol: &Tolerances) -> Result<DysonMap> {
        DysonMap::external_with_inverse(self.omega.clone(), self.omega_inv.clone(), tol)
    }
}

/// `exp(a σ_y) = cosh a · I + sinh a · σ_y`.
fn exp_sigma_y(a: f64) -> ComplexMatrix {
    identity(2).scale(a.cosh()) + sigma_y().scale(a.sinh())
}

pub fn dimer_build(p: &DimerParams, tol: &Tolerances) -> Result<DimerModel> {
    p.validate(tol)?;
    let i_sigma_z = sigma_z().map(|z| z * c64(0.0, 1.0));
    Ok(DimerModel {
        params: *p,
        h: sigma_x().scale(p.omega),
        omega: exp_sigma_y(p.alpha / 2.0),
        omega_inv: exp_sigma_y(-p.alpha / 2.0),
        hamiltonian: sigma_x().scale(p.kappa) + i_sigma_z.scale(p.gamma),
        theta: exp_sigma_y(p.alpha),
    })
}

/// Relative Frobenius residuals of
/// `Ω⁻¹σ_xΩ = σ_x cosh α + iσ_z sinh α` and
/// `Ω⁻¹σ_zΩ = σ_z cosh α − iσ_x sinh α` for `Ω = e^{(α/2)σ_y}`.
pub fn bch_conjugation_check(alpha: f64) -> (f64, f64) {
    let omega = exp_sigma_y(alpha / 2.0);
    let omega_inv = exp_sigma_y(-alpha / 2.0);
    let i = c64(0.0, 1.0);
    let (x, z) = (sigma_x(), sigma_z());
    let rhs_x = x.scale(alpha.cosh()) + z.map(|v| v * i).scale(alpha.sinh());
    let rhs_z = z.scale(alpha.cosh()) - x.map(|v| v * i).scale(alpha.sinh());
    let lhs_x = &omega_inv * &x * &omega;
    let lhs_z = &omega_inv * &z * &omega;
    (
        fro(&(lhs_x - &rhs_x)) / fro(&rhs_x),
        fro(&(lhs_z - &rhs_z)) / fro(&rhs_z),
    )
}
