//! Error type shared by every module in the crate.
//!
//! Variants are grouped by failure class rather than by module so that
//! callers (most importantly the CLI) can map them onto stable exit codes
//! without matching on message strings.

use std::path::PathBuf;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// The file system said no: missing file, bad permissions, short write.
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A file exists but its contents violate the documented format.
    /// `line` is 1-based and counts physical lines, header included.
    #[error("parse error in {path} at line {line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    /// Inputs are well-formed but violate a precondition
    /// (single-class corpus, oversized split, k larger than the pair list...).
    #[error("invalid input: {0}")]
    Validation(String),

    /// Two resources that must be aligned pairwise have different lengths.
    #[error("alignment error: {message} ({left} vs {right} entries)")]
    Alignment {
        left: usize,
        right: usize,
        message: String,
    },

    /// Numeric failure: divergent training loss, empty distribution after a
    /// hard ban, perplexity of an empty sentence, and similar dead ends.
    #[error("numeric error: {0}")]
    Numeric(String),
}

impl Error {
    /// Stable process exit code for this failure class: 2 for I/O, 3 for
    /// malformed or invalid data, 4 for misaligned resources, 5 for numeric
    /// dead ends. Success is 0; nothing maps to 1.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } => 2,
            Error::Parse { .. } | Error::Validation(_) => 3,
            Error::Alignment { .. } => 4,
            Error::Numeric(_) => 5,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }

    /// Prepend `context: ` to the message of a message-bearing variant,
    /// keeping the failure class (and therefore the exit code) unchanged.
    /// I/O errors already carry their path and pass through untouched.
    pub fn with_context(self, context: &str) -> Self {
        match self {
            Error::Validation(m) => Error::Validation(format!("{context}: {m}")),
            Error::Numeric(m) => Error::Numeric(format!("{context}: {m}")),
            Error::Parse {
                path,
                line,
                message,
            } => Error::Parse {
                path,
                line,
                message: format!("{context}: {message}"),
            },
            Error::Alignment {
                left,
                right,
                message,
            } => Error::Alignment {
                left,
                right,
                message: format!("{context}: {message}"),
            },
            other => other,
        }
    }
}
