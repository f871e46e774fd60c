use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("ambient dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix is not skew-symmetric (max asymmetry {0:e})")]
    NotSkew(f64),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("`{id}` is not realizable here: {note}")]
    Unrealizable { id: String, note: String },

    #[error("unknown catalog entry `{0}`")]
    UnknownEntry(String),

    #[error("parameter p = {p} out of range for `{id}` (valid: {range})")]
    OutOfRange { id: String, p: i64, range: String },

    #[error("config error in `{field}`: {msg}")]
    Config { field: String, msg: String },

    #[error("internal numerical failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
