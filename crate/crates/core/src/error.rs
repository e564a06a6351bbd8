use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KhrError {
    #[error("coefficient overflow")]
    Overflow,

    /// A term carries a half-integer power of exactly one of q, t.
    #[error("term {term} mixes parities of the q and t exponents")]
    ParityMismatch { term: String },

    #[error("invalid parameters ({m}, {n}): m and n must be positive")]
    InvalidParams { m: i64, n: i64 },

    #[error("({m}, {n}) is a torus link (gcd = {gcd}); only knots are supported, links lead to infinite sums")]
    LinksUnsupported { m: i64, n: i64, gcd: i64 },

    #[error("unsupported coloring configuration at ({x}, {y}): {detail}")]
    UnsupportedConfiguration { x: i64, y: i64, detail: String },

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("not divisible by (1 - t)")]
    NotDivisible,

    #[error("malformed input: {0}")]
    Parse(String),

    /// Broken internal invariant; always a bug.
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T, E = KhrError> = std::result::Result<T, E>;
