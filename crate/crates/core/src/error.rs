//! Error type shared across the crate.

use crate::token::{Token, TokenSet};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("unknown token `{0}` (outside the declared universe)")]
    UnknownToken(Token),

    #[error("entailment entry for ({witness}; {set}) has no matching consistency pair")]
    DanglingEntail { witness: Token, set: TokenSet },

    #[error("pair ({witness}; {set}) is not in Con")]
    NotConsistent { witness: Token, set: TokenSet },

    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("{0} is not bounded by the given element")]
    NotBounded(String),

    #[error("step function is not below the target function at {0}")]
    NotBelow(Token),

    #[error("poset is not an L-domain: {0}")]
    NotLDomain(String),

    #[error("systems do not match: {0}")]
    SystemMismatch(String),

    #[error("associate lookup at ({witness}; {set}) found {found} matches instead of one")]
    LookupNotUnique {
        witness: Token,
        set: TokenSet,
        found: usize,
    },

    #[error("witness data invalid: {0}")]
    WitnessInvalid(String),

    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },

    #[error("invalid poset: {0}")]
    PosetInvalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
