//! Crate-wide error type.

use std::path::PathBuf;
use thiserror::Error;

/// Coarse error category, used by callers (notably the CLI) to map failures
/// to exit codes and machine-parsable diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    /// A referenced input file or directory does not exist.
    MissingInput,
    /// An input file exists but its contents are malformed.
    Format,
    /// An internal invariant or precondition was violated.
    Invariant,
}

impl ErrorCategory {
    pub fn as_str(self) -> &'static str {
        match self {
            ErrorCategory::MissingInput => "missing-input",
            ErrorCategory::Format => "format",
            ErrorCategory::Invariant => "invariant",
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("input not found: {path}")]
    MissingInput { path: PathBuf },

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Format {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error("duplicate doc_id {doc_id:?}")]
    DuplicateDocId { doc_id: String },

    #[error("duplicate (topic, doc) pair ({topic}, {doc_id})")]
    DuplicateEntry { topic: String, doc_id: String },

    #[error("corpus is empty")]
    EmptyCorpus,

    #[error("document {doc_id:?} has no sentences")]
    EmptyDocument { doc_id: String },

    #[error("vector {id:?} has dimension {got}, index dimension is {expected}")]
    DimensionMismatch {
        id: String,
        expected: usize,
        got: usize,
    },

    #[error("vector {id:?} contains a non-finite component")]
    NonFiniteVector { id: String },

    #[error("duplicate vector id {id:?}")]
    DuplicateVectorId { id: String },

    #[error("no embedding stored for id {id:?}")]
    MissingVector { id: String },

    #[error("segment {segment_id:?} has no parent document mapping")]
    UnknownSegment { segment_id: String },

    #[error("doc_id {doc_id:?} unknown to the index")]
    UnknownDocId { doc_id: String },

    #[error("{path}: bad magic; not a {expected} file")]
    BadMagic { path: PathBuf, expected: &'static str },

    #[error("{path}: unsupported format version {found} (expected {expected})")]
    UnsupportedVersion {
        path: PathBuf,
        found: u32,
        expected: u32,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("paired samples have mismatched lengths: {a} vs {b}")]
    PairedLengthMismatch { a: usize, b: usize },

    #[error("empty sample")]
    EmptySample,

    #[error("need at least {folds} judged topics for {folds}-fold cross-validation, have {topics}")]
    TooFewTopics { folds: usize, topics: usize },
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::MissingInput { .. } => ErrorCategory::MissingInput,
            Error::Io { .. }
            | Error::Format { .. }
            | Error::BadMagic { .. }
            | Error::UnsupportedVersion { .. } => ErrorCategory::Format,
            _ => ErrorCategory::Invariant,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// Open a file for buffered reading, mapping a missing path to
/// [`Error::MissingInput`].
pub(crate) fn open_buffered(path: &std::path::Path) -> Result<std::io::BufReader<std::fs::File>> {
    if !path.exists() {
        return Err(Error::MissingInput {
            path: path.to_path_buf(),
        });
    }
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(std::io::BufReader::new(file))
}

pub(crate) fn io_err(path: &std::path::Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}
