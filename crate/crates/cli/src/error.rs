use srm_core::SrmError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numerical(_) => 2,
            CliError::Usage(_) | CliError::Io(_) => 1,
        }
    }
}

impl From<SrmError> for CliError {
    fn from(e: SrmError) -> Self {
        match e {
            SrmError::Numerical(_) | SrmError::ZeroColumn(_) => CliError::Numerical(e.to_string()),
            SrmError::Io(io) => CliError::Io(io),
            other => CliError::Usage(other.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}
