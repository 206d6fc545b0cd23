//! Error type shared by all modules.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by constellation construction, quantization and the
/// capacity solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unsupported size {size} for {family} constellation")]
    UnsupportedSize { family: &'static str, size: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("constellation has zero average energy")]
    ZeroEnergy,

    #[error("gain must be strictly positive, got {0}")]
    NonPositiveGain(f64),

    #[error("dimension must be 1 or 2, got {0}")]
    InvalidDimension(usize),

    #[error("degenerate constellation: zero-width bounding box in dimension {0}")]
    DegenerateConstellation(usize),

    #[error("invalid probability distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid transition matrix: {0}")]
    InvalidMatrix(String),

    #[error("optimizer failed to converge: {0}")]
    ConvergenceFailure(String),

    #[error("the Lagrange condition has no root: g(lambda) never changes sign")]
    NoRoot,

    #[error("every gain at the first search depth is infeasible")]
    AllGainsInfeasible,

    #[error("distribution contains zero-probability symbols")]
    DegenerateDistribution,

    #[error("support mismatch: first distribution is positive where second is zero")]
    SupportMismatch,

    #[error("curves are defined on different sigma grids")]
    GridMismatch,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl Error {
    /// Stable machine-readable variant name, used in CLI diagnostics.
    pub fn name(&self) -> &'static str {
        match self {
            Error::UnsupportedSize { .. } => "UnsupportedSize",
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::ZeroEnergy => "ZeroEnergy",
            Error::NonPositiveGain(_) => "NonPositiveGain",
            Error::InvalidDimension(_) => "InvalidDimension",
            Error::DegenerateConstellation(_) => "DegenerateConstellation",
            Error::InvalidDistribution(_) => "InvalidDistribution",
            Error::InvalidMatrix(_) => "InvalidMatrix",
            Error::ConvergenceFailure(_) => "ConvergenceFailure",
            Error::NoRoot => "NoRoot",
            Error::AllGainsInfeasible => "AllGainsInfeasible",
            Error::DegenerateDistribution => "DegenerateDistribution",
            Error::SupportMismatch => "SupportMismatch",
            Error::GridMismatch => "GridMismatch",
            Error::InvalidParameter(_) => "InvalidParameter",
        }
    }
}
