use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("variable count mismatch: {0} vs {1}")]
    VarCountMismatch(usize, usize),
    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),
    #[error("variable index {index} out of range for {nvars} variables")]
    VarIndex { index: usize, nvars: usize },
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("zero polynomial not allowed: {0}")]
    ZeroPolynomial(&'static str),
    #[error("polynomial has degree 0 in variable {0}")]
    NotInVariable(usize),
    #[error("not homogeneous: {0}")]
    NotHomogeneous(String),
    #[error("degree cap exceeded: {needed} > {cap}")]
    DegreeCap { needed: u64, cap: u64 },
    #[error("not an invariant subspace pair: residual {0}")]
    NotInvariant(String),
    #[error("indeterminate at precision {0} bits")]
    Indeterminate(u32),
    #[error("image computation failed: {0}")]
    ImageFailed(String),
    #[error("insufficient precision: {0}")]
    Precision(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("algebraic degree {0} is below 2")]
    LowDegree(u32),
    #[error("resource bound exceeded: {0}")]
    Resource(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
