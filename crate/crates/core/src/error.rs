use thiserror::Error;

use crate::quantization::RootSource;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid chain configuration: {0}")]
    InvalidSpec(String),

    #[error("unsupported sector with {0} excitations (only 1 or 2)")]
    UnsupportedSector(usize),

    #[error("basis was built for a different chain")]
    BasisMismatch,

    #[error("bound pair undefined: {0}")]
    UndefinedPair(String),

    #[error("parameters outside the formula's regime: {0}")]
    Regime(String),

    #[error("singular parameters: {0}")]
    Singular(String),

    #[error("{root_source:?}: expected {expected} physically distinct roots, found {found}")]
    RootCount {
        root_source: RootSource,
        expected: usize,
        found: usize,
    },

    #[error("root finding failed: {0}")]
    RootFinding(String),

    #[error("eigensolver did not converge after {iterations} iterations (off-diagonal residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("initial state is not normalized (norm {0})")]
    Unnormalized(f64),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("insufficient support for a localization fit: {0} usable sites")]
    InsufficientSupport(usize),

    #[error("trace is missing observable {0}")]
    MissingObservable(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NoConvergence { .. }
            | Error::RootCount { .. }
            | Error::RootFinding(_)
            | Error::Singular(_)
            | Error::InsufficientSupport(_) => 3,
            _ => 2,
        }
    }
}
