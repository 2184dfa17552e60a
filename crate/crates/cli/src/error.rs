use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Library(#[from] privsel::Error),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn config(field: &str, reason: impl std::fmt::Display) -> Self {
        CliError::Config(format!("field `{field}`: {reason}"))
    }

    /// 2 config, 3 unreachable target, 4 numerical guard, 1 anything else.
    pub fn exit_code(&self) -> u8 {
        use privsel::Error as E;
        match self {
            CliError::Config(_) => 2,
            CliError::Library(E::InvalidParameter { .. } | E::InfeasibleMean { .. }) => 2,
            CliError::Library(E::UnreachableTarget { .. } | E::EmptyCurve) => 3,
            CliError::Library(E::GridTooCoarse { .. } | E::MemoryBudget { .. }) => 4,
            CliError::Library(_) | CliError::Io(_) => 1,
        }
    }
}
