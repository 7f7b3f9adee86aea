use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid monodromy: {0}")]
    InvalidMonodromy(String),

    #[error("disconnected cover: {0}")]
    DisconnectedCover(String),

    #[error("group mismatch: {0} vs {1}")]
    GroupMismatch(String, String),

    #[error("capability limit: {0}")]
    Capability(String),

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("internal consistency failure: {0}")]
    InternalConsistency(String),
}

impl Error {
    /// Process exit code for this error under the CLI contract.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InternalConsistency(_) => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
