use thiserror::Error;

/// Failures of a run, split by exit status.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, config keys or parameter values (exit 2).
    #[error("usage: {0}")]
    Usage(String),
    /// A numerical route failed (exit 3).
    #[error("{0}")]
    Computation(#[from] asep_core::Error),
    /// Validation checks failed (exit 3).
    #[error("validation failed: {0}")]
    Failed(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Computation(e) if is_input_error(e) => 2,
            CliError::Computation(_) | CliError::Failed(_) | CliError::Io(_) => 3,
        }
    }
}

/// Core errors that reject the caller's parameters rather than a
/// computation.
fn is_input_error(e: &asep_core::Error) -> bool {
    use asep_core::Error::*;
    matches!(e, InvalidParameter(_) | Size(_) | Domain(_))
}
