use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid mesh: {0}")]
    Validation(String),
    #[error("oracle size policy exceeded: {size} nodes > {limit}")]
    OracleSize { size: usize, limit: usize },
    #[error("invalid path spec: {0}")]
    Spec(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invariant<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Invariant(msg.into()))
}
