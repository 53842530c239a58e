use std::path::PathBuf;

use thiserror::Error;

use crate::states::ValidationReport;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller broke an operation's precondition (bad shape, index, parameter range).
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("invalid density matrix: {0}")]
    InvalidState(ValidationReport),

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed state file: {0}")]
    Format(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn contract<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Contract(msg.into()))
}
