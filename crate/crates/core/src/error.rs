use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate box {0:?}: width and height must be positive")]
    DegenerateBox([f64; 4]),

    #[error("invalid class score vector: {0}")]
    InvalidScores(String),

    #[error("{targets} targets cannot be matched against {predictions} predictions")]
    TooManyTargets { targets: usize, predictions: usize },

    #[error("{section} record {index}: {message}")]
    Record {
        section: &'static str,
        index: usize,
        message: String,
    },

    #[error("malformed document: {0}")]
    Document(String),

    #[error("missing field `{0}`")]
    MissingField(&'static str),

    #[error("class {0} has no training samples")]
    EmptyClass(String),

    #[error("unknown category `{0}`")]
    UnknownCategory(String),

    #[error("split plan has {expected} parts but {actual} detection lists were given")]
    PartCountMismatch { expected: usize, actual: usize },

    #[error("unstructurable table: {0}")]
    Unstructurable(String),

    #[error("unmappable header: {0}")]
    UnmappableHeader(String),

    #[error("cannot parse amount `{0}`")]
    Amount(String),

    #[error("cannot parse date `{0}`")]
    Date(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
