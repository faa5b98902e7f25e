use thiserror::Error;

use crate::field::Field;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands live in different fields ({left} vs {right})")]
    FieldMismatch { left: Field, right: Field },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("cannot parse scalar `{0}`")]
    ParseScalar(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is not nilpotent")]
    NotNilpotent,
    #[error("operators {i} and {j} do not commute")]
    NotCommuting { i: usize, j: usize },
    #[error("operator {index} is not nilpotent")]
    OperatorNotNilpotent { index: usize },
    #[error("modules have different numbers of operators ({left} vs {right})")]
    GMismatch { left: usize, right: usize },
    #[error("bundles live over different base contexts")]
    ContextMismatch,
    #[error("monomial ideal has infinite colength: no pure power of variable {variable}")]
    InfiniteColength { variable: usize },
    #[error("radical computation needs characteristic 0 or p > algebra dimension (p = {p}, dim = {dim})")]
    UnsupportedCharacteristic { p: u64, dim: usize },
    #[error("operation requires an indecomposable bundle")]
    Decomposable,
    #[error("operation requires g = 1 (got g = {0})")]
    RequiresCurve(usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("summand {summand}: {message}")]
    Semantic { summand: usize, message: String },
    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),
}
