use thiserror::Error;

/// Errors raised by series arithmetic, eta-quotient analysis and congruence checks.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("series precision must be at least 1")]
    EmptySeries,
    #[error("constant term {0} is not a unit")]
    NonUnitConstant(String),
    #[error("negative exponent {0}; compose pow with invert explicitly")]
    NegativeExponent(i64),
    #[error("invalid progression: residue {residue} is not below modulus {modulus}")]
    InvalidProgression { modulus: u64, residue: u64 },
    #[error("modulus {0} out of range (need 2 <= m < 2^32)")]
    InvalidModulus(u64),
    #[error("moduli differ: {0} vs {1}")]
    ModulusMismatch(u64, u64),
    #[error("need precision {needed}, have {available}")]
    InsufficientPrecision { needed: usize, available: usize },
    #[error("{divisor} does not divide level {level}")]
    NotADivisor { divisor: u64, level: u64 },
    #[error("level must be positive")]
    InvalidLevel,
    #[error("weight {0} is not an integer")]
    NonIntegralWeight(String),
    #[error("leading exponent sum {0} is not divisible by 24")]
    NonIntegralOffset(i64),
    #[error("leading exponent {0} is negative; Laurent series are not supported")]
    NegativeOffset(i64),
    #[error("{0} is not an odd prime")]
    NotAnOddPrime(u64),
    #[error("multiplier violates the support condition at index {0}")]
    SupportViolation(usize),
    #[error("{0} must be positive")]
    NotPositive(&'static str),
    #[error("parameter {name} = {value} exceeds the limit {limit}")]
    LimitExceeded {
        name: &'static str,
        value: u64,
        limit: u64,
    },
    #[error("two constructions of {0} disagree")]
    ConstructionMismatch(&'static str),
    #[error("malformed eta-quotient description: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
