use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument violates an operation's precondition.
    #[error("domain error: {0}")]
    Domain(String),

    /// A single lookup record is invalid; scans skip and count these.
    #[error("invalid record: {0}")]
    Record(String),

    #[error("input contains no valid lookup records")]
    EmptyInput,

    #[error("I/O error at line {line}: {source}")]
    Io {
        line: usize,
        #[source]
        source: io::Error,
    },

    /// Two histograms were built with different scan parameters.
    #[error("cannot merge histograms: {0}")]
    Merge(String),

    /// A lookup inside a batch failed.
    #[error("lookup {lookup} in batch: {source}")]
    Batch {
        lookup: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn record(msg: impl Into<String>) -> Self {
        Error::Record(msg.into())
    }
}
