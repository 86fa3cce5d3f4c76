use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    /// Both factors carry a series constant; the product leaves the span of {1, A2, A1}.
    #[error("product of two non-constant linear forms is outside the basis {{1, A2, A1}}")]
    NonLinearProduct,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("sieve range {requested} exceeds capacity {limit}")]
    CapacityExceeded { requested: usize, limit: usize },

    #[error("x = {x} is outside the range [0, {limit}]")]
    RangeExceeded { x: String, limit: String },

    #[error("invalid sequence: {0}")]
    InvalidSequence(String),

    #[error("invalid character: {0}")]
    InvalidCharacter(String),

    #[error("{0} is not a fundamental discriminant with |D| >= 3")]
    NotFundamentalDiscriminant(i64),

    #[error("exponent {0} outside the supported range -2..=3")]
    ExponentOutOfRange(i32),

    #[error("x = {x} outside the domain [0, {end}]")]
    OutOfDomain { x: String, end: String },

    #[error("negative power of t evaluated at t = 0")]
    SingularAtZero,

    #[error("integrand has a t^-1 term on ({lo}, {hi}); no power-rule antiderivative")]
    LogCase { lo: i64, hi: i64 },

    #[error("weighted integrand diverges at 0+ (exponent {exponent} on (0, 1))")]
    DivergentAtZero { exponent: i32 },

    #[error("domain mismatch: {0}")]
    DomainMismatch(String),

    #[error("series constant A1 is not certifiable for sequence '{0}'")]
    A1NotCertifiable(String),

    #[error("precision target {target:e} not attainable (bound {bound:e})")]
    PrecisionUnattainable { target: f64, bound: f64 },

    #[error("missing magnitude bound for sequence '{0}'")]
    MissingMagnitudeBound(String),

    #[error("{0}")]
    Domain(String),

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
