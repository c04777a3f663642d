use thiserror::Error;

/// Errors produced by the analysis and design routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is singular to working precision ({0})")]
    SingularMatrix(String),

    #[error("eigenvalue iteration did not converge after {sweeps} sweeps")]
    ConvergenceFailure { sweeps: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("invalid time arguments: {0}")]
    InvalidTime(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid horizon: {0}")]
    InvalidHorizon(String),

    #[error("operation requires a {expected} model")]
    DomainMismatch { expected: &'static str },

    #[error("system is not controllable (controllability matrix is singular)")]
    Uncontrollable,

    #[error("operation supports single-input models only, got {inputs} inputs")]
    MultiInput { inputs: usize },

    #[error("{0} is not positive definite")]
    NotPositiveDefinite(String),

    #[error("Gramian is singular on the requested horizon ({0})")]
    SingularGramian(String),

    #[error("measurement grid does not match the declared horizon: {0}")]
    GridMismatch(String),

    #[error("weight {0} is not positive (semi)definite as required")]
    IndefiniteWeight(String),

    #[error("weight {0} is not symmetric")]
    NonSymmetricWeight(String),
}

impl Error {
    /// Stable identifier used in reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::SingularMatrix(_) => "SingularMatrix",
            Error::ConvergenceFailure { .. } => "ConvergenceFailure",
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::NonFinite(_) => "NonFinite",
            Error::InvalidTime(_) => "InvalidTime",
            Error::InvalidGrid(_) => "InvalidGrid",
            Error::InvalidHorizon(_) => "InvalidHorizon",
            Error::DomainMismatch { .. } => "DomainMismatch",
            Error::Uncontrollable => "Uncontrollable",
            Error::MultiInput { .. } => "MultiInput",
            Error::NotPositiveDefinite(_) => "NotPositiveDefinite",
            Error::SingularGramian(_) => "SingularGramian",
            Error::GridMismatch(_) => "GridMismatch",
            Error::IndefiniteWeight(_) => "IndefiniteWeight",
            Error::NonSymmetricWeight(_) => "NonSymmetricWeight",
        }
    }

    /// True for failures caused by the numbers themselves (as opposed to
    /// malformed requests).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::SingularMatrix(_)
                | Error::ConvergenceFailure { .. }
                | Error::Uncontrollable
                | Error::NotPositiveDefinite(_)
                | Error::SingularGramian(_)
                | Error::IndefiniteWeight(_)
                | Error::NonFinite(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
