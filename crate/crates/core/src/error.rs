use thiserror::Error;

/// Errors raised by the numerical kernels and the dilation pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("value {modulus} is not unimodular within {tolerance}")]
    NotUnimodular { modulus: f64, tolerance: f64 },

    #[error("invalid tolerances: {0}")]
    InvalidTolerances(&'static str),

    #[error("matrix is singular (|det| = {det_abs:e})")]
    SingularMatrix { det_abs: f64 },

    #[error("matrix is not Hermitian (max asymmetry {asymmetry:e})")]
    NotHermitian { asymmetry: f64 },

    #[error(
        "|Sigma| = {abs_sigma} exceeds 2, the row cannot be made orthogonal to the all-ones row"
    )]
    SigmaTooLarge { abs_sigma: f64 },

    #[error("triplet cannot be completed to three orthogonal rows: {0}")]
    NotCompletable(String),

    #[error(
        "quadratic interpolation inconsistent (held-out residual {residual:e}, bound {bound:e})"
    )]
    InterpolationInconsistent { residual: f64, bound: f64 },

    #[error("zero denominator")]
    ZeroDenominator,

    #[error("companion denominator vanishes (|F3 G2 - F2 G3| = {abs:e})")]
    DegenerateDenominator { abs: f64 },

    #[error("fundamental polynomial vanishes identically (max relative value {max_relative:e})")]
    DegenerateFamily { max_relative: f64 },

    #[error("numerical anomaly: {0}")]
    NumericalAnomaly(String),

    #[error("polynomial fit failed: {0}")]
    FitFailed(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
