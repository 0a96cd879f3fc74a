use thiserror::Error;

/// Failure classes, mapped to exit codes 1 and 2.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad config, arguments or input files.
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }
}

impl From<tscl_coop::Error> for CliError {
    fn from(e: tscl_coop::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

/// Tags a core error as a validation failure.
pub fn invalid(e: impl std::fmt::Display) -> CliError {
    CliError::Validation(e.to_string())
}
