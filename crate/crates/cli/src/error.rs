use std::fmt;

/// Failure of a command, classified by exit code.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Config or argument could not be read.
    Parse(String),
    /// Input was read but is not acceptable.
    Validation(String),
    /// A size cap was hit.
    Resource(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Resource(_) => 3,
            CliError::Parse(_) => 4,
        }
    }

    pub fn context(self, at: impl fmt::Display) -> Self {
        match self {
            CliError::Parse(m) => CliError::Parse(format!("{at}: {m}")),
            CliError::Validation(m) => CliError::Validation(format!("{at}: {m}")),
            CliError::Resource(m) => CliError::Resource(format!("{at}: {m}")),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Parse(m) => write!(f, "parse error: {m}"),
            CliError::Validation(m) => write!(f, "validation error: {m}"),
            CliError::Resource(m) => write!(f, "resource limit: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<polariton::Error> for CliError {
    fn from(e: polariton::Error) -> Self {
        match e {
            polariton::Error::Resource { .. } => CliError::Resource(e.to_string()),
            other => CliError::Validation(other.to_string()),
        }
    }
}
