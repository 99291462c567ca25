use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("field too small: {0}")]
    FieldTooSmall(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("linearly dependent basis")]
    DependentBasis,
    #[error("zero form")]
    ZeroForm,
    #[error("interpolation failed: nullspace dimension {0}")]
    Interpolation(usize),
    #[error("underdetermined interpolation: {got} points, {needed} monomials")]
    Underdetermined { got: usize, needed: usize },
    #[error("retry budget exhausted: {0}")]
    BudgetExhausted(String),
    #[error("genericity guard failed: {0}")]
    NotGeneric(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("malformed input: {0}")]
    Malformed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
