use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error at `{path}`: {message}")]
    Schema { path: String, message: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("numerical failure: {0}")]
    Numerical(#[from] ncilw_core::Error),

    /// In-run checks failed; the outputs were still written.
    #[error("{0} check(s) failed")]
    ChecksFailed(usize),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("output validation failed for {path}: {message}")]
    OutputValidation { path: String, message: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Schema { .. } | CliError::Config(_) => 2,
            CliError::Numerical(_) | CliError::ChecksFailed(_) => 3,
            CliError::Io { .. } | CliError::OutputValidation { .. } => 4,
        }
    }
}
