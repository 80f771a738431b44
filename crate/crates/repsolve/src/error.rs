//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// The input interval contains 0, so its sign (and logarithm) is undetermined.
    #[error("interval contains zero: sign is ambiguous")]
    AmbiguousSign,

    /// The interval straddles a half-integer, so the nearest integer is undetermined.
    #[error("interval straddles a half-integer: nearest integer is ambiguous")]
    AmbiguousNearest,

    /// A floor/comparison could not be certified at the current working precision.
    #[error("result not certifiable at current precision")]
    Unresolved,

    /// Precision escalation hit the policy ceiling without certifying the result.
    #[error("precision exhausted at {bits} bits: {context}")]
    PrecisionExhausted { bits: u32, context: String },

    /// No convergent within the probe budget produced a positive epsilon.
    #[error("no positive epsilon after probing {probes} convergents (stage {stage})")]
    NoPositiveEpsilon { probes: u32, stage: u8 },

    /// The self-referential bound resolution hypothesis H > (4 l^2)^l failed.
    #[error("bound resolution hypothesis failed: H <= (4 l^2)^l for l = {l}")]
    HypothesisFailed { l: u32 },

    /// A closed-form A-value failed its lower-bound precondition for concrete digits.
    #[error("height check failed: {0}")]
    HeightCheckFailed(String),

    /// Repdigit invariants violated (digit/length/base out of range).
    #[error("invalid repdigit: digit {digit}, length {length}, base {base}")]
    InvalidRepdigit { digit: u32, length: u32, base: u32 },

    /// Rational with zero denominator.
    #[error("zero denominator")]
    ZeroDenominator,

    /// Command-line / configuration error.
    #[error("usage: {0}")]
    Usage(String),
}

impl Error {
    /// True for signals that a caller should respond to by escalating precision.
    pub fn is_precision_signal(&self) -> bool {
        matches!(
            self,
            Error::AmbiguousSign | Error::AmbiguousNearest | Error::Unresolved
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
