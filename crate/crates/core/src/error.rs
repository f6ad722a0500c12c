use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("row {row}: expected {expected} columns, found {found}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("no data rows")]
    NoDataRows,

    #[error("unknown label column `{0}`")]
    UnknownLabelColumn(String),

    #[error("row {row}: label value `{value}` is not binary")]
    InvalidLabel { row: usize, value: String },

    #[error("no informative features")]
    NoInformativeFeatures,

    #[error("no features selected")]
    NoFeaturesSelected,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate graph: {0}")]
    DegenerateGraph(String),

    #[error("labels must contain both outliers and normal objects")]
    SingleClassLabels,

    #[error("dataset has no labels")]
    MissingLabels,

    #[error("graph too large for structural statistics: {nodes} nodes exceeds cap {cap}")]
    GraphTooLarge { nodes: usize, cap: usize },

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
