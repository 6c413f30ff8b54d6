use thiserror::Error;

pub type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),

    #[error(transparent)]
    Core(#[from] quantumness_core::Error),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("report: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// 1 for bad input, 3 for failures that indicate a numerical bug.
    pub fn exit_code(&self) -> i32 {
        use quantumness_core::Error as E;
        match self {
            CliError::Core(E::NotPsd { .. } | E::NonUnitary { .. } | E::InvalidPovm(_) | E::UndefinedPosterior { .. }) => 3,
            _ => 1,
        }
    }
}
