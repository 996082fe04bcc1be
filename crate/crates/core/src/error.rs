use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error("coefficient domain mismatch: {0} vs {1}")]
    DomainMismatch(String, String),

    #[error("polynomial is not weight-homogeneous")]
    NotHomogeneous,

    #[error("operation needs a field, got {0}")]
    NotAField(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("composition of differentials is nonzero")]
    NonzeroComposition,

    #[error("invalid range: {0}")]
    InvalidRange(String),

    #[error("integrand has a pole on the cycle: |f_S| = {value:e} at node {node}")]
    PoisonedEvaluation { value: f64, node: String },
}

pub type Result<T> = std::result::Result<T, Error>;
