use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("singular matrix (condition estimate {cond:e} exceeds cap {cap:e})")]
    SingularMatrix { cond: f64, cap: f64 },

    #[error("matrix is not symmetric (max |m - m^T| = {residual:e})")]
    NotSymmetric { residual: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("degenerate parameters: {0}")]
    DegenerateParameters(String),

    #[error("degenerate Gramian: {0}")]
    DegenerateGram(String),

    #[error("generator mismatch: {left} vs {right} generators")]
    GeneratorMismatch { left: usize, right: usize },

    #[error("exponent argument must be even with zero scalar part")]
    NotNilpotentSafe,

    #[error("Gaussian weight has vanishing determinant b11*b22 - b12*b21")]
    DegenerateDelta,

    #[error("matrix is not of Gaussian canonical form: {0}")]
    NotGaussianGeneric(String),

    #[error("coefficient ratios disagree: max relative deviation {deviation:e}")]
    InconsistentRatio { deviation: f64 },

    #[error("left-hand side of the Grassmann pentagon relation vanishes identically")]
    ZeroSide,
}

pub type Result<T> = std::result::Result<T, Error>;
