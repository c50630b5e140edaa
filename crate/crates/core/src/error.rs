//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(
        "invalid bounding box ({xmin}, {ymin})-({xmax}, {ymax}): need xmin < xmax and ymin < ymax"
    )]
    InvalidBoundingBox {
        xmin: f64,
        ymin: f64,
        xmax: f64,
        ymax: f64,
    },
    #[error("cell size must be positive and finite, got {0}")]
    InvalidCellSize(f64),
    #[error("point ({x}, {y}) lies outside the grid extent")]
    PointOutsideGrid { x: f64, y: f64 },
    #[error("cell index ({row}, {col}) out of range for a {nrows}x{ncols} grid")]
    InvalidCellIndex {
        row: usize,
        col: usize,
        nrows: usize,
        ncols: usize,
    },
    #[error("field has {got} values but the grid has {expected} cells")]
    FieldSizeMismatch { got: usize, expected: usize },
    #[error("non-finite value in {context}")]
    NonFinite { context: &'static str },
    #[error("bandwidth must be positive and finite, got {0}")]
    InvalidBandwidth(f64),
    #[error("point set is empty")]
    EmptyPointSet,
    #[error("level {0} outside [0, 1]")]
    InvalidLevel(f64),
    #[error("levels must be strictly increasing within [0, 1]")]
    InvalidLevels,
    #[error("level step {0} outside (0, 0.5]")]
    InvalidLevelStep(f64),
    #[error("ranking value {0} outside [0, 1]")]
    InvalidRankValue(f64),
    #[error("invalid mixture model: {0}")]
    InvalidModel(String),
    #[error("sample count must be at least 1")]
    EmptySample,
    #[error("missing required column `{0}` in header")]
    MissingColumn(String),
    #[error("line {line}: {message}")]
    InvalidRow { line: u64, message: String },
    #[error("malformed {what}: {detail}")]
    Malformed { what: &'static str, detail: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
