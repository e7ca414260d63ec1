use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid problem size: n = {n}, k = {k} (need n >= 1 and k <= n)")]
    InvalidSize { n: usize, k: usize },

    #[error("invalid argument `{name}`: {reason}")]
    InvalidArgument { name: &'static str, reason: String },

    #[error("pool is empty")]
    EmptyPool,

    #[error("item {item} is outside the universe of {n} items")]
    ItemOutOfRange { item: usize, n: usize },

    #[error("noise channels apply to raw outcomes only, got an erasure")]
    ErasedInput,

    #[error("algorithm received an erased outcome without a retry wrapper")]
    UnexpectedErasure,

    #[error("test budget of {budget} exhausted")]
    BudgetExhausted { budget: usize },

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("I/O error at {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidArgument {
            name,
            reason: reason.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
