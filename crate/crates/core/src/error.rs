use thiserror::Error;

/// Failures raised by the numerical routines.
///
/// Every variant corresponds to a distinct, checkable condition so that
/// front ends can map them onto stable exit codes.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("invalid tolerance {name} = {value} (must be strictly positive)")]
    InvalidTolerance { name: &'static str, value: f64 },

    #[error(
        "DefectiveMatrix: eigenvector matrix condition number {condition:e} exceeds {threshold:e}"
    )]
    DefectiveMatrix { condition: f64, threshold: f64 },

    #[error("ComplexSpectrum: eigenvalue imaginary part {max_imag:e} exceeds {threshold:e}")]
    ComplexSpectrum { max_imag: f64, threshold: f64 },

    #[error("NotPositiveDefinite: smallest eigenvalue {min_eigenvalue:e} <= {threshold:e}")]
    NotPositiveDefinite { min_eigenvalue: f64, threshold: f64 },

    #[error("NotHermitian: Hermiticity residual {residual:e} exceeds {threshold:e}")]
    NotHermitian { residual: f64, threshold: f64 },

    #[error("SingularInput: matrix is numerically singular")]
    SingularInput,

    #[error("NoConvergence: {0} did not converge")]
    NoConvergence(&'static str),

    #[error("SingularScaling: |k[{index}]| = {magnitude:e} is too small")]
    SingularScaling { index: usize, magnitude: f64 },

    #[error("NotUnitary: ||U^H U - I|| = {residual:e} exceeds {threshold:e}")]
    NotUnitary { residual: f64, threshold: f64 },

    #[error("AvatarNotHermitian: avatar Hermiticity residual {residual:e} exceeds {threshold:e}")]
    AvatarNotHermitian { residual: f64, threshold: f64 },

    #[error("NotQuasiHermitian: residual {residual:e} exceeds {threshold:e}")]
    NotQuasiHermitian { residual: f64, threshold: f64 },

    #[error("NotHermitianGenerator: residual {residual:e} exceeds {threshold:e}")]
    NotHermitianGenerator { residual: f64, threshold: f64 },

    #[error("EPRegion: |gamma| = {gamma_abs} >= kappa = {kappa}, spectrum is not real")]
    EpRegion { kappa: f64, gamma_abs: f64 },

    #[error("InvalidCoupling: {0}")]
    InvalidCoupling(String),

    #[error("SingularDysonMap: determinant {det:e} of the inverse map vanishes")]
    SingularDysonMap { det: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
