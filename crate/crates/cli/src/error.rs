use graphstate_core::Error as CoreError;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    /// Malformed JSON. `message` already carries the line and column.
    #[error("{origin}: {message}")]
    Syntax {
        origin: String,
        line: usize,
        column: usize,
        message: String,
    },

    /// Well-formed document that does not describe a valid graph.
    #[error("{origin}: {}", .errors.join("; "))]
    Invalid { origin: String, errors: Vec<String> },

    #[error("{0}")]
    Io(String),

    #[error(transparent)]
    Core(#[from] CoreError),
}

impl CliError {
    /// 1 usage, 2 validation, 3 budget.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Syntax { .. } | CliError::Invalid { .. } | CliError::Io(_) => 2,
            CliError::Core(e) => match e {
                CoreError::BudgetExceeded { .. } | CoreError::OrderTooLarge { .. } | CoreError::DimensionTooLarge { .. } => 3,
                _ => 2,
            },
        }
    }
}
