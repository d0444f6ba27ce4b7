//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by geometric predicates, window construction, transforms
/// and the recovery pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// Lattice generator is singular or numerically near-singular.
    #[error("singular lattice generator: {0}")]
    SingularLattice(String),

    /// Operands live in different dimensions.
    #[error("dimension mismatch: {0}")]
    Dim(String),

    /// A set did not provide enough points for the requested operation.
    #[error("too few points: {0}")]
    TooFewPoints(String),

    /// Invalid domain data (degenerate box, bad grid shape, ...).
    #[error("invalid domain: {0}")]
    Domain(String),

    /// Window construction received a spectrum with no energy.
    #[error("zero window: {0}")]
    ZeroWindow(String),

    /// Growth metadata (alpha, beta) is unavailable for this window.
    #[error("missing class data: {0}")]
    MissingClassData(String),

    /// The requested reconstruction domain is not a fundamental cell.
    #[error("bad reconstruction domain: {0}")]
    BadDomain(String),

    /// Shannon samples do not cover the requested targets.
    #[error("insufficient sample coverage: {0}")]
    Coverage(String),

    /// Zero flip requested at a real zero (f and h coincide).
    #[error("degenerate zero flip: {0}")]
    DegenerateFlip(String),

    /// Translate system has effective rank zero.
    #[error("degenerate translate system: {0}")]
    DegenerateSystem(String),

    /// A uniqueness gate failed while gate policy is `enforce`.
    #[error("gate failure under enforce policy: {0}")]
    Gate(String),

    /// Signal energy outside the declared support exceeds the budget.
    #[error("support violation: {0}")]
    Support(String),

    /// The set family cannot be classified by the Zalik criterion.
    #[error("unclassifiable set: {0}")]
    Unclassifiable(String),

    /// Separation of the set is zero (or indistinguishable from zero).
    #[error("set is not separated: {0}")]
    NotSeparated(String),

    /// The aliasing counterexample requires a gate-failing lattice.
    #[error("no counterexample: {0}")]
    NoCounterexample(String),

    /// Recovered zeroth slice carries no usable signal energy.
    #[error("zero signal: {0}")]
    ZeroSignal(String),

    /// Malformed file or serialization payload.
    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

/// Convenience alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;
