//! Error classification for process exit codes.

use std::fmt;

/// Exit codes: 0 success, 2 usage, 3 data validation, 4 numerical failure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitClass {
    Usage,
    Data,
    Numerical,
}

impl ExitClass {
    pub fn code(&self) -> i32 {
        match self {
            ExitClass::Usage => 2,
            ExitClass::Data => 3,
            ExitClass::Numerical => 4,
        }
    }
}

#[derive(Debug)]
pub struct CliError {
    pub class: ExitClass,
    pub message: String,
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.message)
    }
}

impl std::error::Error for CliError {}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            class: ExitClass::Usage,
            message: message.into(),
        }
    }

    pub fn data(message: impl Into<String>) -> Self {
        Self {
            class: ExitClass::Data,
            message: message.into(),
        }
    }

    pub fn numerical(message: impl Into<String>) -> Self {
        Self {
            class: ExitClass::Numerical,
            message: message.into(),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Core-library failures surface as numerical errors.
pub fn numerical(err: impl fmt::Display) -> CliError {
    CliError::numerical(err.to_string())
}

/// I/O failures on user inputs surface as data errors.
pub fn data(err: impl fmt::Display) -> CliError {
    CliError::data(err.to_string())
}
