use std::fmt;

use infoplan::Error;

/// Process exit status for each failure class.
pub mod exit {
    pub const OK: i32 = 0;
    pub const IO: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const MODEL: i32 = 3;
    pub const RESOURCE: i32 = 4;
    pub const NUMERICAL: i32 = 5;
    pub const TARGET_NOT_REACHED: i32 = 6;
}

#[derive(Debug)]
pub enum CliError {
    Io(String),
    Usage(String),
    Core(Error),
    /// A core error with advice for the user.
    Hint(Error, String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => exit::IO,
            CliError::Usage(_) => exit::USAGE,
            CliError::Core(e) | CliError::Hint(e, _) => match e {
                Error::Domain(_) | Error::Model(_) | Error::Internal(_) => exit::MODEL,
                Error::Resource { .. } => exit::RESOURCE,
                Error::Numerical(_) => exit::NUMERICAL,
                Error::TargetNotReached { .. } => exit::TARGET_NOT_REACHED,
            },
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Hint(e, hint) => write!(f, "{e}\n{hint}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}
