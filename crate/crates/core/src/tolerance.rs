use crate::error::{Error, Result};

/// Numerical thresholds shared by every check in the crate.
///
/// All residuals are measured relative to Frobenius norms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Relative residual bound for identities such as `M v = λ v` or `R R = P`.
    pub residual_rel: f64,
    /// Bound on imaginary parts of eigenvalues, relative to the matrix norm.
    pub reality_rel: f64,
    /// Smallest admissible eigenvalue of a positive-definite matrix, relative to its norm.
    pub positivity_rel: f64,
    /// Eigenvector-matrix condition number above which a matrix counts as defective.
    pub defective_cond: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            residual_rel: 1e-10,
            reality_rel: 1e-9,
            positivity_rel: 1e-12,
            defective_cond: 1e8,
        }
    }
}

impl Tolerances {
    pub fn new(
        residual_rel: f64,
        reality_rel: f64,
        positivity_rel: f64,
        defective_cond: f64,
    ) -> Result<Self> {
        let tol = Self {
            residual_rel,
            reality_rel,
            positivity_rel,
            defective_cond,
        };
        tol.validate()?;
        Ok(tol)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("residual_rel", self.residual_rel),
            ("reality_rel", self.reality_rel),
            ("positivity_rel", self.positivity_rel),
            ("defective_cond", self.defective_cond),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidTolerance { name, value });
            }
        }
        Ok(())
    }
}
