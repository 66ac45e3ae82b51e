use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CliError {
    /// Scenario file or flags are malformed or violate an invariant.
    #[error("configuration error: {0}")]
    Config(String),
    /// The computation is undefined for the given (valid) inputs.
    #[error("domain error: {0}")]
    Domain(String),
    /// Analytic and brute-force results disagree.
    #[error("verification failed: {0}")]
    Verify(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Domain(_) => 2,
            CliError::Verify(_) => 3,
        }
    }

    /// Maps a core error raised while computing (not while parsing).
    pub(crate) fn compute(err: pandemic_games::Error) -> Self {
        match err {
            pandemic_games::Error::Domain(msg) => CliError::Domain(msg),
            other => CliError::Config(other.to_string()),
        }
    }
}
