use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("gradient of the level set vanishes at {point:?} (|grad S| = {norm:e})")]
    DegenerateGradient { point: [f64; 3], norm: f64 },

    #[error("chart is degenerate at (lambda, theta) = ({lambda}, {theta})")]
    DegenerateChart { lambda: f64, theta: f64 },

    #[error("projection onto `{surface}` did not converge from {start:?} (|S| = {residual:e})")]
    ProjectionFailed {
        surface: String,
        start: [f64; 3],
        residual: f64,
    },

    #[error("cannot draw {requested} points from a set of {available}")]
    SubsetTooLarge { requested: usize, available: usize },

    #[error("training set is empty")]
    EmptyTrainingSet,

    #[error("unknown surface `{0}`")]
    UnknownSurface(String),

    #[error("reference solution is identically zero")]
    ZeroReference,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("operation requires a level-set surface, `{0}` is parametric")]
    NotLevelSet(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed file {path}: {reason}")]
    Parse { path: PathBuf, reason: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
