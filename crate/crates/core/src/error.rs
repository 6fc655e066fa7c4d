use std::path::PathBuf;

use thiserror::Error;

/// Errors produced while ingesting history, computing features or exporting matrices.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: malformed commit record: {reason}")]
    MalformedRecord { line: usize, reason: String },

    #[error("line {line}: duplicate commit sha `{sha}`")]
    DuplicateCommit { line: usize, sha: String },

    #[error("line {line}: release `{release}` is not listed in the release manifest")]
    UnknownRelease { line: usize, release: String },

    #[error("invalid release manifest: {0}")]
    Manifest(String),

    #[error("release `{0}` not found in commit store")]
    ReleaseNotFound(String),

    #[error("file `{path}` was not changed in release `{release}`")]
    NotComputed { release: String, path: String },

    #[error("extraction failed: {0}")]
    Extraction(String),

    #[error("tag `{0}` does not exist in the repository")]
    MissingTag(String),

    #[error("eigenvector centrality did not converge after {iterations} iterations")]
    Convergence { iterations: usize },

    #[error("hyperedge score mismatch: {0}")]
    ScoreMismatch(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error("duplicate path `{0}`")]
    DuplicatePath(String),

    #[error("non-finite value in column `{column}` for row `{row}`")]
    NonFinite { column: String, row: String },

    #[error("refusing to export an empty matrix (use force to override)")]
    EmptyMatrix,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Short, stable identifier used in machine-readable diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::MalformedRecord { .. } => "malformed-record",
            Error::DuplicateCommit { .. } => "duplicate-commit",
            Error::UnknownRelease { .. } => "unknown-release",
            Error::Manifest(_) => "manifest",
            Error::ReleaseNotFound(_) => "release-not-found",
            Error::NotComputed { .. } => "not-computed",
            Error::Extraction(_) => "extraction",
            Error::MissingTag(_) => "missing-tag",
            Error::Convergence { .. } => "convergence",
            Error::ScoreMismatch(_) => "score-mismatch",
            Error::Schema(_) => "schema",
            Error::DuplicatePath(_) => "duplicate-path",
            Error::NonFinite { .. } => "non-finite",
            Error::EmptyMatrix => "empty-matrix",
            Error::Config(_) => "config",
            Error::Io { .. } => "io",
            Error::Csv(_) => "csv",
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
