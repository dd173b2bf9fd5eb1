use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("payoff entry ({row}, {col}) = {value} lies outside [-1, 1]")]
    EntryOutOfRange { row: usize, col: usize, value: f64 },

    #[error("gap parameter {0} must lie in (0, 1]")]
    InvalidDelta(f64),

    #[error("adversarial instance needs at least two actions per player, got {m}x{n}")]
    TooFewActions { m: usize, n: usize },

    #[error("invalid strategy: {0}")]
    InvalidStrategy(String),

    #[error("non-finite exponent argument at coordinate {index}")]
    NonFiniteWeight { index: usize },

    #[error("utility {value} at coordinate {index} lies outside [-1, 1]")]
    UtilityOutOfRange { index: usize, value: f64 },

    #[error("argument outside the map's domain: {0}")]
    OutOfDomain(String),

    #[error("bound requires strictly positive learning rates")]
    ZeroRate,

    #[error("rate parameters lie outside the feasible region")]
    Infeasible,

    #[error("preset {preset} needs m, n >= 2 (got {m}x{n})")]
    DegenerateGame {
        preset: &'static str,
        m: usize,
        n: usize,
    },

    #[error("dynamic-regret bound needs a horizon T")]
    MissingHorizon,

    #[error(
        "optimizer did not converge after {iterations} iterations (gradient norm {grad_norm:e})"
    )]
    NotConverged { iterations: usize, grad_norm: f64 },

    #[error("weight gamma = {0} outside the admissible range")]
    InvalidGamma(f64),

    #[error("invalid arguments: {0}")]
    InvalidArgs(String),

    #[error("unknown preset '{0}'")]
    UnknownPreset(String),

    #[error("config error in '{field}': {message}")]
    Config { field: String, message: String },

    #[error("{path}:{line}: {message}")]
    MatrixFile {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}
