use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum ExpError {
    #[error("config key `{key}`: {message}")]
    Config { key: String, message: String },
    #[error(transparent)]
    Core(#[from] spr_core::Error),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("report json: {0}")]
    Json(#[from] serde_json::Error),
}

impl ExpError {
    pub fn config(key: &str, message: String) -> Self {
        ExpError::Config {
            key: key.to_string(),
            message,
        }
    }

    /// Process exit status for this error: 2 for configuration problems, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            ExpError::Config { .. } => 2,
            _ => 1,
        }
    }
}

pub type Result<T, E = ExpError> = std::result::Result<T, E>;
