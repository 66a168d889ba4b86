use thiserror::Error;

/// Errors raised by basis construction, assembly and the eigensolvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum FewBodyError {
    #[error("invalid basis: {0}")]
    InvalidBasis(String),
    #[error("degenerate basis: no overlap eigenvalue survives the threshold {threshold:e}")]
    DegenerateBasis { threshold: f64 },
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("potential `{0}` cannot be evaluated at complex arguments")]
    UnsupportedComplexEvaluation(String),
    #[error("integration failure: {0}")]
    IntegrationFailure(String),
    #[error("alpha = {alpha:e} outside interpolation range [{min:e}, {max:e}]")]
    OutOfRange { alpha: f64, min: f64, max: f64 },
    #[error("shape mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("state index {index} out of range (available: {available})")]
    InvalidIndex { index: usize, available: usize },
    #[error("no solution: {0}")]
    NoSolution(String),
    #[error("invalid symmetry: {0}")]
    InvalidSymmetry(String),
    #[error("non-central potential: {0}")]
    NonCentralPotential(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

impl FewBodyError {
    /// True for errors caused by inconsistent input rather than numerics.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            FewBodyError::InvalidBasis(_)
                | FewBodyError::InvalidIndex { .. }
                | FewBodyError::InvalidSymmetry(_)
                | FewBodyError::NonCentralPotential(_)
                | FewBodyError::InvalidParams(_)
                | FewBodyError::ShapeMismatch { .. }
                | FewBodyError::UnsupportedComplexEvaluation(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, FewBodyError>;
