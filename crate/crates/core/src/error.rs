use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    /// Malformed input: missing table entries, unknown identifiers, bad dimensions.
    #[error("structural error: {}", .0.join("; "))]
    Structural(Vec<String>),
    #[error("{what} would have {size} elements, above the cap of {cap}")]
    CapExceeded { what: String, size: String, cap: u128 },
    #[error("type mismatch: {0}")]
    TypeMismatch(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    pub fn structural(msg: impl Into<String>) -> Self {
        Error::Structural(vec![msg.into()])
    }

    pub fn cap(what: impl Into<String>, size: Option<u128>, cap: u128) -> Self {
        Error::CapExceeded {
            what: what.into(),
            size: size.map_or_else(|| "too many".to_string(), |s| s.to_string()),
            cap,
        }
    }
}
