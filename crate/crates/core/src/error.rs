use thiserror::Error;

use crate::gaussian::GaussianInt;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("gcd of (0, 0) is undefined")]
    ZeroGcd,

    #[error("division by zero")]
    DivisionByZero,

    #[error("partial quotient {0} has norm < 2 and is not in the alphabet")]
    InvalidQuotient(GaussianInt),

    #[error("word has zero denominator and is not a valid expansion")]
    ZeroDenominator,

    #[error("enclosure meets a cell boundary at {bits} bits")]
    Undecidable { bits: u32 },

    #[error("enclosure contains zero; cannot divide")]
    BoxContainsZero,

    #[error("need {needed} certified quotients of z, only {available} available; raise precision")]
    InsufficientPrecision { needed: usize, available: usize },

    #[error("discrepancy is only defined for targets outside Q(i) (or with a longer expansion)")]
    RationalTarget,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("geometry: {0}")]
    Geometry(String),

    #[error("region does not match any of the 13 regular interiors: {0}")]
    Unclassifiable(String),

    #[error("search budget of {0} nodes exhausted")]
    BudgetExhausted(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
