use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("gcd undefined: both arguments are zero")]
    GcdUndefined,
    #[error("point at infinity")]
    PointAtInfinity,
    #[error("inversion at origin")]
    InversionAtOrigin,
    #[error("backend mismatch: {0}")]
    BackendMismatch(String),
    #[error("not an integer point of the Siegel model: {0}")]
    NotIntegerPoint(String),
    #[error("point violates the Siegel constraint: {0}")]
    ConstraintViolation(String),
    #[error("matrix is not in U(2,1;Z[i])")]
    NotUnitary,
    #[error("ambiguous at working precision ({bits} bits)")]
    Ambiguous { bits: u32 },
    #[error("invalid digit string: {0}")]
    InvalidDigitString(String),
    #[error("divergent product: radius {0} >= 1")]
    DivergentProduct(f64),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("identity undefined (some v_i = 0)")]
    IdentityUndefined,
    #[error("rational expansion exceeded its termination guard at depth {0}")]
    TerminationGuard(usize),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("exact backend required")]
    ExactRequired,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
