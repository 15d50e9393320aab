use thiserror::Error;

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags or configuration; exit code 2.
    #[error("{0}")]
    Usage(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("{}: {source}", path.display())]
    File {
        path: std::path::PathBuf,
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Lab(xorlab::Error),
}

impl From<xorlab::Error> for CliError {
    fn from(e: xorlab::Error) -> Self {
        match e {
            xorlab::Error::InvalidConfig(msg) => CliError::Usage(msg),
            xorlab::Error::InvalidQuadrant(_) | xorlab::Error::QuadrantNeedsPrelu => {
                CliError::Usage(e.to_string())
            }
            other => CliError::Lab(other),
        }
    }
}

impl CliError {
    pub fn file(path: impl Into<std::path::PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::File { path, source }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}
