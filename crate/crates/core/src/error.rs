use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("vector is not normalized (norm {norm})")]
    Normalization { norm: f64 },

    #[error("cannot normalize the zero vector")]
    ZeroVector,

    #[error("tails are not comparable: {0}")]
    TailMismatch(String),

    #[error("unsupported tail combination: {0}")]
    UnsupportedTail(String),

    #[error("operator is not an orthogonal projection (residual {residual:e})")]
    NotAProjection { residual: f64 },

    #[error("branch cap {cap} exceeded ({needed} branches needed); raise branch_cap or prune_threshold")]
    BranchOverflow { cap: usize, needed: usize },

    #[error("sector relation is not transitive on states ({0}, {1}, {2})")]
    TransitivityViolation(usize, usize, usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
