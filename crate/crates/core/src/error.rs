use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Invalid distribution or formula parameters.
    #[error("parameter error: {0}")]
    Parameter(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// The request exceeds a hard budget (enumeration size, dimension).
    #[error("refused: {0}")]
    Refused(String),

    /// A construction broke one of its own guarantees.
    #[error("construction error: {0}")]
    Construction(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error at {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<V, E = Error> = std::result::Result<V, E>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
