use thiserror::Error;

/// Failure modes shared across the crate. Formula mismatches and theorem
/// violations are reported as `Inconsistency` rather than panicking so that
/// callers (and the CLI) can surface them with context and a nonzero exit.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("integer sets must contain at least one element")]
    EmptySet,

    #[error("bit-vector capacity exceeded: need {required} bits, limit is {limit}")]
    Capacity { required: u128, limit: u64 },

    #[error("integer overflow while computing {what}")]
    Overflow { what: &'static str },

    #[error("enumeration too large: {count} compositions exceed the cap of {cap}")]
    EnumerationCap { count: u128, cap: u64 },

    #[error("invalid {kind} spec: requires {requirement}")]
    InvalidSpec {
        kind: &'static str,
        requirement: String,
    },

    #[error("invalid search config: {0}")]
    InvalidConfig(String),

    #[error("internal inconsistency: {0}")]
    Inconsistency(String),

    #[error("cannot parse integer set: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
