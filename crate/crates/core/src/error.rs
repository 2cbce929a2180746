use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("no irreducible polynomial of degree {0} found")]
    NoIrreducibleFound(usize),
    #[error("budget exceeded for {what}: need {needed}, limit {limit}")]
    BudgetExceeded {
        what: &'static str,
        needed: String,
        limit: String,
    },
    #[error("division by zero")]
    DivisionByZero,
    #[error("element is not in the subfield of degree {0}")]
    NotInSubfield(usize),
    #[error("{0} does not divide {1}")]
    NotADivisor(usize, usize),
    #[error("expected length {expected}, got {got}")]
    BadLength { expected: usize, got: usize },
    #[error("operands belong to different fields")]
    MixedFields,
    #[error("scalar must be nonzero")]
    ZeroScalar,
    #[error("operation needs a nonzero subspace")]
    ZeroSubspace,
    #[error("representatives {0} and {1} lie in the same orbit")]
    DuplicateOrbits(usize, usize),
    #[error("argument lies outside the map domain F_(q^{0})")]
    DomainViolation(usize),
    #[error("map is not injective (rank {rank} < {dim})")]
    NotInjective { rank: usize, dim: usize },
    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),
    #[error("q = {0} is too small for this construction")]
    QTooSmall(u64),
    #[error("k = {0} is too small for this construction")]
    KTooSmall(usize),
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("block primes are not distinct")]
    PrimesNotDistinct,
    #[error("guard violated: {0}")]
    GuardViolation(String),
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("invalid artifact: {0}")]
    InvalidArtifact(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn budget(what: &'static str, needed: impl ToString, limit: impl ToString) -> Error {
    Error::BudgetExceeded {
        what,
        needed: needed.to_string(),
        limit: limit.to_string(),
    }
}
