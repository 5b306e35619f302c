use thiserror::Error;

/// Errors raised by operators, solvers and the experiment harness.
#[derive(Debug, Error)]
pub enum SrmError {
    #[error("length mismatch: expected {expected}, got {actual}")]
    Length { expected: usize, actual: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("dimension {dim} exceeds materialization cap {cap}")]
    Size { dim: usize, cap: usize },

    #[error("column {0} of the sparsifying basis is identically zero")]
    ZeroColumn(usize),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, SrmError>;

pub(crate) fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(SrmError::Length { expected, actual })
    }
}
