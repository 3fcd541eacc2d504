use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u32),
    #[error("field of order {p}^{e} is too large (limit {limit})")]
    FieldTooLarge { p: u32, e: u32, limit: u32 },
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("series has constant term {0}, expected 1")]
    NonUnitConstantTerm(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("multiplication is not commutative on basis pair ({0}, {1})")]
    NotCommutative(usize, usize),
    #[error("multiplication is not associative on basis triple ({0}, {1}, {2})")]
    NotAssociative(usize, usize, usize),
    #[error("unit vector fails u*b = b on basis element {0}")]
    BadUnit(usize),
    #[error("variable `{0}` has no pure-power bound, quotient is infinite dimensional")]
    InfiniteDimensional(String),
    #[error("the ideal is the unit ideal")]
    UnitIdeal,
    #[error("polynomial is not monic of positive degree")]
    NonMonic,
    #[error("algebra is not local")]
    NotLocal,
    #[error("base fields differ: F_{{{0}}} vs F_{{{1}}}")]
    FieldMismatch(u32, u32),
    #[error("extension degree {target} is not a multiple of {base}")]
    BadDegree { base: u32, target: u32 },
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("field too small: every element is excluded; need extension degree {0}")]
    FieldTooSmall(u32),
    #[error("x - alpha is a zero divisor on module `{0}`")]
    NzdPreconditionFailed(String),
    #[error("invalid module: {0}")]
    InvalidModule(String),
    #[error("resolution check failed: {0}")]
    ResolutionCheck(String),
}

pub type Result<T> = std::result::Result<T, Error>;
