use thiserror::Error;

/// Errors surfaced by the library.
///
/// The CLI maps these onto its exit-code scheme: `InvalidSpec`,
/// `InsufficientTerms`, `OutOfRange` and `SelectionFailed` are
/// configuration/usage problems, `CapacityExceeded` and
/// `PrecisionExceeded` are resource problems.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A sieve build would exceed the configured memory budget.
    #[error("sieve of limit {limit} needs ~{required} bytes, budget is {budget} bytes")]
    CapacityExceeded {
        limit: u64,
        required: u64,
        budget: u64,
    },

    /// A query addressed a value beyond the sieved range.
    #[error("{what} = {value} exceeds table limit {limit}")]
    OutOfRange {
        what: &'static str,
        value: u64,
        limit: u64,
    },

    /// The fixed-point phase guard n * 2^-frac_bits < 2^-64 was violated.
    #[error("phase precision guard violated: n = {n} requires n < 2^(frac_bits - 64) at frac_bits = {frac_bits}")]
    PrecisionExceeded { n: u64, frac_bits: u32 },

    /// An explicit continued fraction ran out of partial quotients.
    #[error("continued fraction exhausted: needed {needed} terms, only {available} available")]
    InsufficientTerms { needed: usize, available: usize },

    /// A construction or parse violated a documented constraint.
    #[error("invalid irrational specification: {0}")]
    InvalidSpec(String),

    /// The convergent straddle for the denominator selection failed.
    #[error("denominator selection failed: {0}")]
    SelectionFailed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
