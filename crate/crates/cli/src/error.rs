use freeze_core::{FreezeError, SelfMap};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },

    #[error("{path}: {msg}")]
    Parse { path: String, msg: String },

    #[error("{0}")]
    Invalid(String),

    #[error(transparent)]
    Core(#[from] FreezeError),
}

impl CliError {
    /// 1 when the input set does not freeze, 3 when the search ran out of
    /// budget, 2 for everything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(FreezeError::NotFrozen { .. }) => 1,
            CliError::Core(FreezeError::Inconclusive { .. }) => 3,
            _ => 2,
        }
    }

    pub fn witness(&self) -> Option<&SelfMap> {
        match self {
            CliError::Core(FreezeError::NotFrozen { witness }) => Some(witness),
            _ => None,
        }
    }
}
