use std::fmt;

/// Failure classes mapped to the process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, configuration or input files (exit 1).
    Usage(String),
    /// The computation itself failed (exit 2).
    Compute(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Compute(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Compute(m) => f.write_str(m),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn usage(e: impl fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

pub fn compute(e: impl fmt::Display) -> CliError {
    CliError::Compute(e.to_string())
}
