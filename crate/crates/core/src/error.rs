use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TpwaError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("point is not contained in any piece region")]
    OutOfDomain,

    #[error("index set is empty")]
    EmptyIndexSet,

    #[error("index {index} is out of range 1..={len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("linear program failed: {0}")]
    SolverFailure(String),

    #[error("index set is compatible at the requested tolerance; no certificate exists")]
    NotIncompatible,

    #[error("certificate is not a subset of the index set")]
    InvalidCertificate,

    #[error("no compatible index set contains the points {uncovered:?}")]
    InfeasibleInstance { uncovered: Vec<usize> },

    #[error("enumeration needs {needed} steps, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },

    #[error("denominator vanishes inside the sampled range")]
    SingularDenominator,

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, TpwaError>;
