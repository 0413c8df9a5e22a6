//! Crate-wide error type.

use thiserror::Error;

/// Errors raised by series, polynomial and solver operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A truncated series ran out of known coefficients.
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),

    /// The valuation of a truncated series with no stored coefficients is
    /// not determined by the known part.
    #[error("valuation unknown: series is 0 + O(t^{order}); increase precision")]
    ValuationUnknown { order: u64 },

    /// An operation that needs complete coefficient information was given a
    /// truncated series.
    #[error("{operation} requires exact series, got a series truncated at O(t^{order})")]
    TruncatedInput { operation: &'static str, order: u64 },

    /// A tuple argument does not match the polynomial's variable count.
    #[error("expected a tuple of {expected} component(s), got {got}")]
    ArityMismatch { expected: usize, got: usize },

    /// The enumeration space exceeds the configured cap.
    #[error("search space of {size} tuples exceeds the cap of {cap}")]
    SearchSpaceExceeded { size: u128, cap: u64 },

    /// A witness-search strategy cannot be applied to the given system.
    #[error("strategy not applicable: {0}")]
    StrategyNotApplicable(String),

    /// A solution family fails to solve the generators it is paired with.
    #[error("family member is not a solution: {0}")]
    InvalidFamily(String),
}

pub type Result<T> = std::result::Result<T, Error>;
