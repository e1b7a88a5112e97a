use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Model(#[from] envq_core::Error),

    #[error("cannot access {}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{0} acceptance criteria failed")]
    Verification(usize),
}

impl CliError {
    pub fn parse(msg: impl Into<String>) -> Self {
        CliError::Parse(msg.into())
    }

    /// Process exit status: 2 parse, 3 model, 4 bound, 5 degeneracy.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Model(envq_core::Error::BoundViolation { .. }) => 4,
            CliError::Model(envq_core::Error::DegenerateSteadyState { .. }) => 5,
            CliError::Model(_) => 3,
            CliError::Io { .. } | CliError::Verification(_) => 1,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
