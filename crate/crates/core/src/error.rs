use thiserror::Error;

use crate::nat::Nat;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("zero is not a natural number here; inputs must be >= 1")]
    Zero,

    #[error("subtree index k = {0} is out of range; k must be >= 2")]
    InvalidSubtree(u32),

    #[error("stair index j = {0} is out of range; j must be >= 1")]
    InvalidStair(u32),

    #[error("malformed term: {0}")]
    InvalidTerm(String),

    #[error("invalid scan range: {0}")]
    InvalidRange(String),

    #[error("cannot parse {0:?} as a natural number")]
    Parse(String),

    #[error("cannot parse {0:?} as a binary verification code")]
    ParseBvc(String),

    /// The orbit did not reach its target within the step budget. This is
    /// a report, not a proof of divergence.
    #[error("step budget of {budget} exhausted without reaching the target (start {start})")]
    BudgetExceeded { start: Nat, budget: u64 },

    /// The first power of two on an orbit had an odd exponent. Impossible
    /// for an orbit starting outside the powers of two.
    #[error("orbit of {start} first reached 2^{exponent} with odd exponent")]
    InternalContradiction { start: Nat, exponent: u64 },
}

pub type Result<T> = std::result::Result<T, Error>;
