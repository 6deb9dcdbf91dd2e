use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("characteristic {0} is not prime")]
    NonPrimeCharacteristic(u64),
    #[error("modulus is reducible over GF({p})")]
    ReducibleModulus { p: u32 },
    #[error("invalid modulus: {0}")]
    InvalidModulus(String),
    #[error("field order {0} is too large")]
    FieldTooLarge(u128),
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("zero element has no multiplicative order")]
    ZeroElement,
    #[error("ambient mismatch: {0}")]
    AmbientMismatch(String),
    #[error("subspace has rank zero")]
    ZeroRankSubspace,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("index tuples have different index sums ({0} vs {1})")]
    UnequalIndexSums(usize, usize),
    #[error("index tuples are identical")]
    IdenticalTuples,
    #[error("invalid index tuple: {0}")]
    InvalidTuple(String),
    #[error("rank {r} out of range for ambient rank {m}")]
    RankOutOfRange { m: usize, r: usize },
    #[error("scheme is not polynomial: h({i},{n}) != 0 with {i} < {n}")]
    NonPolynomialScheme { i: usize, n: usize },
    #[error("covector basis is not degree-reduced: {0}")]
    UnreducedBasis(String),
    #[error("operation undefined on the zero polynomial")]
    ZeroPolynomial,
    #[error("invalid scheme: {0}")]
    InvalidScheme(String),
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("sequence is not strictly increasing: {0}")]
    MonotonicityViolation(String),
    #[error("enumeration of {needed} candidates exceeds budget {budget}")]
    BudgetExceeded { needed: String, budget: u64 },
    #[error("greedy blocker base case needs {needed} candidates, budget is {budget}")]
    BaseCaseBudgetExceeded { needed: String, budget: u64 },
    #[error("{members} members exceed the blocking hypothesis bound {bound}")]
    HypothesisViolated { members: usize, bound: usize },
    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
}
