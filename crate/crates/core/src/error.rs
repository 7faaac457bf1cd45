use std::path::PathBuf;

use thiserror::Error;

/// A caller broke an operation's precondition (bad slot index, score out of
/// range, ...).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("contract violation: {0}")]
pub struct ContractViolation(String);

impl ContractViolation {
    pub fn new(msg: impl Into<String>) -> Self {
        Self(msg.into())
    }
}

/// Coarse classification used by front ends to pick a status code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ErrorKind {
    Validation,
    Conflict,
    NotFound,
    State,
    Internal,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("{message}")]
    Validation {
        message: String,
        field: Option<&'static str>,
    },

    #[error("conflict: {0}")]
    Conflict(String),

    #[error("not found: {0}")]
    NotFound(String),

    #[error("invalid state: {0}")]
    State(String),

    #[error("incomplete: slots {} not accepted", fmt_slots(.slots))]
    Incomplete { slots: Vec<u8> },

    #[error(transparent)]
    Contract(#[from] ContractViolation),

    #[error("configuration: {0}")]
    Config(String),

    #[error("no uncommon suggestion for category {category:?} after {attempts} draws")]
    GenerationExhausted { category: String, attempts: u32 },

    #[error("{}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}:{line}: invalid UTF-8", path.display())]
    Decode { path: PathBuf, line: usize },

    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("answer hashing failed: {0}")]
    Hash(String),
}

fn fmt_slots(slots: &[u8]) -> String {
    slots
        .iter()
        .map(u8::to_string)
        .collect::<Vec<_>>()
        .join(", ")
}

impl Error {
    pub fn validation(message: impl Into<String>) -> Self {
        Error::Validation {
            message: message.into(),
            field: None,
        }
    }

    pub fn validation_field(field: &'static str, message: impl Into<String>) -> Self {
        Error::Validation {
            message: message.into(),
            field: Some(field),
        }
    }

    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Validation { .. } | Error::Contract(_) => ErrorKind::Validation,
            Error::Conflict(_) => ErrorKind::Conflict,
            Error::NotFound(_) => ErrorKind::NotFound,
            Error::State(_) | Error::Incomplete { .. } => ErrorKind::State,
            Error::Config(_)
            | Error::GenerationExhausted { .. }
            | Error::Io { .. }
            | Error::Decode { .. }
            | Error::Parse { .. }
            | Error::Hash(_) => ErrorKind::Internal,
        }
    }

    /// Name of the request field the error refers to, when there is one.
    pub fn field(&self) -> Option<&'static str> {
        match self {
            Error::Validation { field, .. } => *field,
            _ => None,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
