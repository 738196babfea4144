use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Engine(#[from] thermal_decoherence::Error),

    #[error("validation failed: {0} check(s) outside tolerance")]
    ValidationFailed(usize),

    #[error("validation aborted: {message}")]
    ValidationAborted { message: String, budget: bool },
}

impl CliError {
    /// 1 = validation failure, 2 = config/input/IO, 3 = numeric budget.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::ValidationFailed(_) => 1,
            CliError::Engine(e) if e.is_numeric_budget() => 3,
            CliError::ValidationAborted { budget: true, .. } => 3,
            _ => 2,
        }
    }
}
