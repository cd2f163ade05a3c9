use std::path::PathBuf;

use thiserror::Error;

use crate::model::NodeId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}:{line}: {field}: {message}")]
    Parse {
        path: String,
        line: usize,
        field: String,
        message: String,
    },

    #[error("invalid building description: {0}")]
    InvalidDescription(String),

    #[error("invalid time series: {0}")]
    InvalidSeries(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("singular linear system (pivot {pivot:e} at column {column})")]
    Singular { column: usize, pivot: f64 },

    #[error("no measurement for forced node {node} at step {step}")]
    MissingMeasurement { node: NodeId, step: usize },

    #[error("node {0} cannot be forced: it is the model output")]
    ForcedOutputNode(NodeId),

    #[error("node {node} out of range 1..={count}")]
    NodeOutOfRange { node: NodeId, count: usize },

    #[error("length mismatch: {what} ({left} vs {right})")]
    LengthMismatch {
        what: &'static str,
        left: usize,
        right: usize,
    },

    #[error("objective undefined: {0}")]
    Objective(String),

    #[error("too many measurable nodes for exhaustive search: {0} (limit {limit})", limit = crate::diagnose::EXHAUSTIVE_LIMIT)]
    TooManyNodes(usize),

    #[error("unknown defect target `{0}`")]
    UnknownTarget(String),

    #[error("evaluator failed on chromosome {chromosome}: {source}")]
    Evaluator {
        chromosome: String,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// Coarse failure class, used for process exit codes and C error codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Input,
    Numerical,
    Io,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Parse { .. }
            | Error::InvalidDescription(_)
            | Error::InvalidSeries(_)
            | Error::InvalidConfig(_)
            | Error::MissingMeasurement { .. }
            | Error::ForcedOutputNode(_)
            | Error::NodeOutOfRange { .. }
            | Error::LengthMismatch { .. }
            | Error::TooManyNodes(_)
            | Error::UnknownTarget(_) => ErrorKind::Input,
            Error::Singular { .. } | Error::Objective(_) => ErrorKind::Numerical,
            Error::Evaluator { source, .. } => source.kind(),
            Error::Io { .. } => ErrorKind::Io,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
