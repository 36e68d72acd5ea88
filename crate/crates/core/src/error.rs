use thiserror::Error;

use crate::exact::Rational;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty digit set")]
    EmptySet,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("cardinality must equal: {nodes} nodes but {frequencies} frequencies")]
    CardinalityMismatch { nodes: usize, frequencies: usize },

    /// Two frequencies whose exponentials are not orthogonal on the node set.
    #[error("frequencies {first} and {second} are not orthogonal")]
    NotOrthogonal { first: Rational, second: Rational },

    #[error("precondition failed: {0}")]
    Precondition(String),

    /// A named hypothesis of a construction does not hold.
    #[error("hypothesis ({clause}) fails: {detail}")]
    Hypothesis { clause: String, detail: String },

    #[error("scale {scale} is not {base}^{power}")]
    NotPerfectPower { scale: i64, base: i64, power: u32 },

    #[error("divisibility condition fails for k={k}, j={j}")]
    Divisibility { k: usize, j: usize },

    #[error("direct sum collision: {0}")]
    DirectSumCollision(String),

    #[error("matrix is singular")]
    Singular,

    #[error("tolerance must be positive, got {0}")]
    InvalidTolerance(f64),

    #[error("incommensurate grid: {0}")]
    Incommensurate(String),

    #[error("slice data is not constant: {0}")]
    NonConstantSlices(String),

    #[error("unsupported structure: {0}")]
    Unsupported(String),

    /// A construction that must succeed did not; indicates a bug.
    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn pre(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub(crate) fn hypothesis(clause: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::Hypothesis {
            clause: clause.into(),
            detail: detail.into(),
        }
    }
}
