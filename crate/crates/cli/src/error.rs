use pe_excite::Error;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Failed(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Failed(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::Io(_) | Error::Parse { .. } | Error::Json(_) => CliError::Io(msg),
            Error::Singular { .. }
            | Error::Infeasible { .. }
            | Error::NotPersistentlyExciting { .. }
            | Error::Underdetermined { .. } => CliError::Failed(msg),
            _ => CliError::Usage(msg),
        }
    }
}
