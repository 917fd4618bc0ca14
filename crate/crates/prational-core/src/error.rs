use thiserror::Error;

/// Library-wide error type. Display strings begin with a stable
/// machine-readable tag so the CLI can echo them verbatim on stderr.
#[derive(Debug, Error)]
pub enum Error {
    #[error("not_prime: {0} is not prime")]
    NotPrime(u64),

    #[error("not_fundamental: {0} is not a fundamental discriminant")]
    NotFundamental(i64),

    #[error("not_coprime: gcd({a}, {b}) > 1")]
    NotCoprime { a: u64, b: u64 },

    #[error("denominator_not_invertible: coefficient at index {0}")]
    DenominatorNotInvertible(usize),

    #[error("precision_too_small: need precision >= {required}, have {have}")]
    PrecisionTooSmall { required: usize, have: usize },

    #[error("invalid_argument: {0}")]
    InvalidArgument(String),

    #[error("no_witness_found: {0}")]
    NoWitnessFound(String),

    #[error("sieve_exhausted: no prime <= {bound} satisfies the sieve conditions")]
    SieveExhausted { bound: u64 },

    #[error("parse: {0}")]
    Parse(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
