use thiserror::Error;

/// Errors raised by the arithmetic kernel and the surface-model pipeline.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("zero input where a nonzero element is required")]
    ZeroInput,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("q = {q} must differ from the characteristic {ell}")]
    QEqualsCharacteristic { q: u64, ell: u64 },
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("polynomial is not monic irreducible: {0}")]
    NotIrreducible(String),
    #[error("base field lacks the q-th roots of unity (q = {q}, field size {size})")]
    MissingRootsOfUnity { q: u64, size: u64 },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("infeasible: {0}")]
    Infeasible(String),
}

pub type Result<T> = std::result::Result<T, Error>;
