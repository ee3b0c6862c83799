use crate::solver::TraceRecord;
use thiserror::Error;

/// Errors produced by the solver toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// The input matrix of a singular-pair computation is identically zero.
    #[error("degenerate direction: matrix is identically zero")]
    DegenerateDirection,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("infeasible point: {0}")]
    Infeasible(String),

    /// The objective left the representable range mid-run. The trace that was
    /// collected up to the failing iteration is attached.
    #[error("objective is not finite at iteration {t}")]
    NonFiniteObjective { t: usize, trace: Vec<TraceRecord> },

    #[error("line search did not satisfy sufficient decrease after {0} backtracks")]
    BacktrackExhausted(usize),

    #[error("IDX format error at byte {offset}: {message}")]
    IdxFormat { offset: u64, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
