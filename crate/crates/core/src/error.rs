use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("position {position} outside [1, {len}]")]
    OutOfRange { position: usize, len: usize },

    #[error("empty input")]
    EmptyInput,

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("input has {found} distinct symbols but alphabet size is {alphabet_size}")]
    AlphabetTooSmall { found: usize, alphabet_size: usize },

    #[error("i/o error: {0}")]
    Io(String),

    #[error("gap too small: derived multiplicative factor {factor} must exceed 1")]
    GapTooSmall { factor: f64 },
}

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
