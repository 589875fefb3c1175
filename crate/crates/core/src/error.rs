use thiserror::Error;

/// Errors raised by the algebraic and planning layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("level k must be non-negative, got {0}")]
    NegativeLevel(i64),
    #[error("group order {p}^{exp} does not fit the index range")]
    OrderOverflow { p: u64, exp: u32 },
    #[error("representation must have at least one summand")]
    EmptyRepresentation,
    #[error("exponent {exponent} is divisible by the group order {order}; the fixed submodule must be zero")]
    TrivialSummand { exponent: i64, order: usize },
    #[error("profile has {got} entries, expected {expected}")]
    ProfileLength { got: usize, expected: usize },
    #[error("m_k = 0 at level k = {k}: apply the effective reduction to level {effective_k} first")]
    TopLevelEmpty { k: u32, effective_k: u32 },
    #[error("group mismatch: Z/{left} vs Z/{right}")]
    GroupMismatch { left: usize, right: usize },
    #[error("exponent n must be non-negative, got {0}")]
    NegativeExponent(i64),
    #[error("truncation n must be at least 1, got {0}")]
    TruncationTooSmall(i64),
    #[error("index l = {l} out of range 0..={k}")]
    LevelOutOfRange { l: u32, k: u32 },
    #[error("identity (a) failed: {0}")]
    IdentityFailed(String),
    #[error("invalid construction parameters: {0}")]
    InvalidConstruction(String),
    #[error("no map constructed: every level has n_l = 0")]
    NoMapConstructed,
    #[error("n = {n} must exceed n_0 = {n0}")]
    BelowConstruction { n: i64, n0: i64 },
    #[error("invalid bound parameters: {0}")]
    InvalidBound(String),
}

pub type Result<T> = std::result::Result<T, Error>;
