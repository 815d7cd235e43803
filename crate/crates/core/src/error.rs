use thiserror::Error;

/// Errors raised by the algebra, tracking and solver layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("ring mismatch: {0}")]
    RingMismatch(String),

    #[error("the zero polynomial has no degree")]
    ZeroPolynomial,

    #[error("invalid degree: {0}")]
    InvalidDegree(String),

    #[error("root finder did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("row {row}: start multidegree {start:?} does not match target multidegree {target:?}")]
    DegreeMismatch {
        row: usize,
        start: Vec<u32>,
        target: Vec<u32>,
    },

    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("system is not square: {equations} equations and {charts} charts for {variables} variables")]
    NotSquare {
        equations: usize,
        charts: usize,
        variables: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no witness points survived: {0}")]
    EmptyWitnessSet(String),

    #[error("all {0} paths failed")]
    AllPathsFailed(usize),

    #[error("start point computation failed at witness point {index}: {msg}")]
    StartPoint { index: usize, msg: String },

    #[error("specialized start polynomial for group {group} is degenerate: {msg}")]
    DegenerateStart { group: usize, msg: String },

    #[error("witness collection is missing entries {0:?}")]
    MissingEntries(Vec<Vec<usize>>),

    #[error("elimination requested at t = {t}, below the activation threshold {t_star}")]
    EliminationTooEarly { t: f64, t_star: f64 },

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn context(self, context: impl Into<String>) -> Error {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
