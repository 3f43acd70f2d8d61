use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch for {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("{what} index {index} out of range for dimension {dim}")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        dim: usize,
    },

    #[error("duplicate {what} index {index} within one event")]
    DuplicateIndex { what: &'static str, index: usize },

    #[error("non-finite {what} value at position {index}")]
    NonFiniteInput { what: &'static str, index: usize },

    #[error("update produced a non-finite weight at (cue {cue}, outcome {outcome})")]
    NonFiniteWeight { cue: usize, outcome: usize },

    #[error("training failed at event {event} (schedule step {step})")]
    Training {
        event: usize,
        step: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid learning rate {0}: must be finite and > 0")]
    InvalidLearningRate(f64),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("value {value} at (cue {cue}, outcome {outcome}) overflows single precision")]
    PrecisionOverflow {
        cue: usize,
        outcome: usize,
        value: f64,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("invalid token {token:?}: {reason}")]
    InvalidToken { token: String, reason: &'static str },

    #[error("unknown column {0:?}")]
    UnknownColumn(String),

    #[error("covariance matrix is not positive definite (pivot {pivot} = {value})")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("design matrix is rank deficient (column {column})")]
    RankDeficient { column: usize },

    #[error("design column {column} duplicates the response")]
    ResponseInDesign { column: usize },

    #[error("word {0:?} is out of vocabulary")]
    OutOfVocabulary(String),

    #[error("zero vector has no direction")]
    ZeroVector,

    #[error("ranks have zero variance")]
    ZeroVariance,

    #[error("too few usable pairs: {found} (need at least {needed})")]
    TooFewPairs { found: usize, needed: usize },

    #[error("bad snapshot: {0}")]
    Snapshot(String),

    #[error("cannot access {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

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
