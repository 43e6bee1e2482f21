use thiserror::Error;

/// Errors raised by the counting, density and oracle routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("determinant 0 has infinitely many SL_n(Z)-orbits")]
    ZeroDeterminant,

    #[error("matrix is singular")]
    Singular,

    #[error("{what}: estimated {estimate} exceeds budget {budget}")]
    BudgetExceeded {
        what: &'static str,
        estimate: u128,
        budget: u128,
    },

    #[error("verification failed: {0}")]
    Verification(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
