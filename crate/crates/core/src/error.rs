use std::io;
use std::path::PathBuf;

use thiserror::Error;

use crate::query::ParseError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("invalid UTF-8 at byte offset {offset}")]
    InvalidUtf8 { offset: usize },
    #[error("document at byte offset {offset} has no <{tag}> element")]
    MissingElement { tag: &'static str, offset: usize },
    #[error("unterminated <{tag}> element starting at byte offset {offset}")]
    Unterminated { tag: &'static str, offset: usize },
    #[error("unexpected content at byte offset {offset}: expected <DOC>")]
    UnexpectedContent { offset: usize },
    #[error("duplicate document name {0:?}")]
    DuplicateName(String),
    #[error("empty document name at byte offset {offset}")]
    EmptyName { offset: usize },
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

/// Failures while opening a persisted index. Each corruption mode has its own
/// variant so callers can tell them apart.
#[derive(Debug, Error)]
pub enum LoadError {
    #[error("no manifest.json in {0}")]
    MissingManifest(PathBuf),
    #[error("unsupported index version {found} (expected {expected})")]
    VersionMismatch { found: u32, expected: u32 },
    #[error("{file} is truncated")]
    Truncated { file: &'static str },
    #[error("checksum mismatch in {file}: stored {stored:#010x}, computed {computed:#010x}")]
    Checksum {
        file: &'static str,
        stored: u32,
        computed: u32,
    },
    #[error("malformed {file}: {reason}")]
    Malformed { file: &'static str, reason: String },
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error("io error: {0}")]
    Io(#[from] io::Error),
    #[error("the collection contains no terms")]
    EmptyCollection,
    #[error("no index has been added to the query environment")]
    NoIndex,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
