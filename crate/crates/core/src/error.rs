use alloc::string::String;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid architecture: {0}")]
    InvalidArchitecture(String),
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("contract violation: {0}")]
    ContractViolation(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("non-finite value: {0}")]
    NonFinite(String),
    #[error(
        "training loss became non-finite at epoch {epoch}; the learning rate is likely too high"
    )]
    Diverged { epoch: usize },
    #[error("polynomials have different variable counts ({left} vs {right})")]
    VariableCountMismatch { left: usize, right: usize },
    #[error("monomial exponent overflow")]
    ExponentOverflow,
    #[error("invalid variable permutation: {0}")]
    InvalidPermutation(String),
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("not enough rows: {rows} rows for {folds} folds")]
    InsufficientRows { rows: usize, folds: usize },
    #[error("zero variance: {0}")]
    ZeroVariance(&'static str),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
