use std::fmt;

use soliton_core::SolitonError;

/// Why a command stopped, and its exit status.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags or parameter values.
    Usage(String),
    /// I/O, numerical or format errors.
    Runtime(String),
    /// The run completed but a check failed.
    Verification(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Verification(_) => 2,
            Failure::Usage(_) | Failure::Runtime(_) => 1,
        }
    }

    pub fn usage(msg: impl Into<String>) -> Self {
        Failure::Usage(msg.into())
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "error: {m}\n\nFor more information, try '--help'."),
            Failure::Runtime(m) => write!(f, "error: {m}"),
            Failure::Verification(m) => write!(f, "verification failed: {m}"),
        }
    }
}

impl From<SolitonError> for Failure {
    fn from(e: SolitonError) -> Self {
        match e {
            SolitonError::InvalidParameter(_) | SolitonError::Incompatible(_) => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Runtime(e.to_string()),
        }
    }
}
