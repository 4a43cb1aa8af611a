use std::fmt;

use thiserror::Error;

/// Which precondition of a pair operation failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PairRequirement {
    PNotPrimitive,
    QNotPrimitive,
    WrongLengths,
    ProductPrimitive,
}

impl PairRequirement {
    /// Stable machine-readable reason string.
    pub fn reason(self) -> &'static str {
        match self {
            PairRequirement::PNotPrimitive => "p not primitive",
            PairRequirement::QNotPrimitive => "q not primitive",
            PairRequirement::WrongLengths => "|p| != 2|q|",
            PairRequirement::ProductPrimitive => "pq is primitive",
        }
    }
}

impl fmt::Display for PairRequirement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.reason())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("empty word has no primitivity status")]
    EmptyWord,
    #[error("alphabet size must be at least 2, got {0}")]
    AlphabetTooSmall(u64),
    #[error("letter {letter} out of range for alphabet of size {alphabet}")]
    LetterOutOfRange { letter: u32, alphabet: u32 },
    #[error("words over different alphabets ({0} vs {1})")]
    AlphabetMismatch(u32, u32),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("cannot parse word: {0}")]
    Parse(String),

    #[error("not a transposition instance: tu != uv")]
    NotTransposition,
    #[error("t and v must be distinct")]
    IdenticalConjugates,

    #[error("{value} exceeds the supported factorization limit {limit}")]
    OutOfRange { value: u64, limit: u64 },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("gcd({l}, {r}) != 1")]
    NotCoprime { l: u64, r: u64 },
    #[error("prime index {0} exceeds the sieve")]
    PrimeIndexOutOfRange(u64),

    #[error("eps1 defined only for even l (got l = {0}); for odd l it is 0")]
    OddLength(u64),
    #[error("closed form stated for l1 >= 2 (l = {0} is a power of 3)")]
    PowerOfThree(u64),
    #[error("non-integral exponent {numerator}/{denominator} in {form}")]
    NonIntegralExponent {
        form: &'static str,
        numerator: u64,
        denominator: u64,
    },

    #[error("budget exceeded: {required} words required, budget is {budget}")]
    BudgetExceeded { required: String, budget: u64 },

    #[error("pair precondition failed: {0}")]
    PairPrecondition(PairRequirement),
    #[error("pair trichotomy violated: {0}")]
    TrichotomyViolated(String),
    #[error("xq precondition failed: {0}")]
    XqPrecondition(&'static str),

    #[error("delta({0}) undefined: Lambda({0}) is empty")]
    DeltaUndefined(u64),
    #[error("prime-product formula requires k >= 3, got {0}")]
    PrimeIndexTooSmall(u64),
    #[error("l values must be even, got {0}")]
    OddInTable(u64),
}

impl Error {
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::BudgetExceeded { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
