use thiserror::Error;

use crate::feature_set::FeatureSet;
use crate::model::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    /// Document parsed but does not follow the expected layout.
    #[error("format: {0}")]
    Format(String),

    #[error("tree {tree}, node {node}: missing cover statistic")]
    MissingCover { tree: usize, node: usize },

    #[error("tree {tree}, node {node}: separate missing-value branch {missing} is not supported")]
    MissingBranch {
        tree: usize,
        node: usize,
        missing: usize,
    },

    #[error("unknown feature name {0:?}")]
    UnknownFeature(String),

    #[error("invalid model: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidModel(Vec<Violation>),

    #[error("dimension mismatch: expected {expected} columns, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("tree {tree} has depth {depth}, above the depth cap {cap} (set GLEX_MAX_DEPTH to raise it)")]
    DepthCapExceeded { tree: usize, depth: usize, cap: usize },

    #[error("tree {tree} splits on {features} distinct features, above the depth cap {cap} (set GLEX_MAX_DEPTH to raise it)")]
    FeatureCapExceeded { tree: usize, features: usize, cap: usize },

    #[error("{d} features exceed the supported maximum of {max}")]
    TooManyFeatures { d: usize, max: usize },

    #[error("exact Shapley enumeration limited to d <= {max}, model has d = {d}")]
    OracleDimension { d: usize, max: usize },

    #[error("density has no weights for subset {0}")]
    MissingDensity(FeatureSet),

    #[error("grid: {0}")]
    Grid(String),

    #[error("feature {feature}: value {value} lies below the first grid point")]
    OutOfGrid { feature: usize, value: f64 },

    #[error("row {row} out of range for {n} rows")]
    RowOutOfRange { row: usize, n: usize },

    #[error("missing or non-numeric value at row {row}, column {column:?}")]
    MissingValue { row: usize, column: String },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}
