use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Failure categories, used by the CLI to choose an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Config,
    Data,
    Numerical,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: file not found")]
    MissingFile { path: PathBuf },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{file}, line {line}, field `{field}`: {message}")]
    Parse {
        file: String,
        line: u64,
        field: String,
        message: String,
    },

    #[error("{file}, line {line}: unknown item_id `{item_id}`")]
    UnknownItem {
        file: String,
        line: u64,
        item_id: String,
    },

    #[error("{file}, line {line}: duplicate sales row for item `{item_id}` week {week}")]
    DuplicateSales {
        file: String,
        line: u64,
        item_id: String,
        week: u32,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("insufficient data: {rows} observations for {cols} parameters (need rows > cols)")]
    InsufficientData { rows: usize, cols: usize },

    #[error("design matrix is rank deficient; linearly dependent columns: {}", columns.join(", "))]
    RankDeficient { columns: Vec<String> },

    #[error("weight at row {row} is not strictly positive ({value})")]
    NonPositiveWeight { row: usize, value: f64 },

    #[error("design has no weights; weighted fit requires a weight vector")]
    MissingWeights,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("fit has no coefficient named `{0}`")]
    MissingCoefficient(String),

    #[error("empty result: {0}")]
    Empty(&'static str),

    #[error("replication {rep}: {source}")]
    Replication {
        rep: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("serialization failed: {0}")]
    Serialize(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Config(_) => ErrorKind::Config,
            Error::MissingFile { .. }
            | Error::Io { .. }
            | Error::Parse { .. }
            | Error::UnknownItem { .. }
            | Error::DuplicateSales { .. }
            | Error::Empty(_)
            | Error::Serialize(_) => ErrorKind::Data,
            Error::InsufficientData { .. }
            | Error::RankDeficient { .. }
            | Error::NonPositiveWeight { .. }
            | Error::MissingWeights
            | Error::Domain(_)
            | Error::MissingCoefficient(_) => ErrorKind::Numerical,
            Error::Replication { source, .. } => source.kind(),
        }
    }

    pub(crate) fn parse(file: &str, line: u64, field: &str, message: impl Into<String>) -> Self {
        Error::Parse {
            file: file.to_string(),
            line,
            field: field.to_string(),
            message: message.into(),
        }
    }
}
