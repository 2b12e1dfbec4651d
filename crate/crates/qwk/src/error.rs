use thiserror::Error;

/// Errors raised anywhere in the engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("incompatible truncation settings")]
    IncompatibleTruncation,
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("replacement for `{0}` is not linear")]
    NotLinear(String),
    #[error("constant term is not invertible")]
    NotInvertible,
    #[error("series precondition violated: {0}")]
    SeriesDomain(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("symbol kind mismatch: {0}")]
    KindMismatch(String),
    #[error("engine invariant violated: {0}")]
    Invariant(String),
    #[error("correlator value is not real: {0}")]
    NonReal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
