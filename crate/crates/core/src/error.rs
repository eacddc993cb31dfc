//! Error type shared by the whole crate.

use thiserror::Error;

/// Errors reported by field construction, arithmetic, and the closed-form
/// operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{0} is even; odd characteristic required")]
    NotOdd(u64),
    #[error("field of order {q} exceeds the configured bound {bound}")]
    TooLarge { q: u64, bound: u64 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different field contexts")]
    ContextMismatch,
    #[error("discrete logarithm of zero is undefined")]
    ZeroArgument,
    #[error("parameter a must be nonzero")]
    ZeroParameter,
    #[error("index {0} is odd; no closed form applies")]
    OddIndex(u64),
    #[error("index 0 is out of range; indexing starts at 1")]
    IndexZero,
    #[error("initial scale {0} must be even")]
    OddC(i64),
    #[error("leading coefficient must be nonzero")]
    ZeroLeadingCoefficient,
    #[error("formula is undefined in characteristic 3")]
    CharacteristicThree,
    #[error("formula is stated for prime fields only")]
    ExtensionField,
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
