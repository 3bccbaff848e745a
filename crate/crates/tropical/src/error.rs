use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A graph value violates a structural invariant (indices, connectivity,
    /// genus bookkeeping, stability).
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    /// Arguments outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An enumeration grew past the configured class-count cap. Results are
    /// never truncated; the caller must raise the cap explicitly.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// A computation would exceed an explicit resource budget.
    #[error("resource limit: {0}")]
    ResourceLimit(String),

    /// An internal cross-check failed (a boundary square, a rank certificate,
    /// an Euler characteristic). These indicate a bug, never bad input.
    #[error("internal consistency failure: {0}")]
    Consistency(String),

    #[error("cache: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
