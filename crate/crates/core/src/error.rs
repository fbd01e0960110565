use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("exponent p = {0} must be a finite real >= 1")]
    InvalidExponent(f64),

    #[error("bound formulas exist only for p = 2 and p = 4, got p = {0}")]
    UnsupportedExponent(f64),

    #[error("coordinate {index} is not finite ({value})")]
    NonFiniteCoordinate { index: usize, value: f64 },

    #[error("a point needs at least one coordinate")]
    EmptyPoint,

    #[error("dimension mismatch: {expected} vs {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("need at least {required} points, got {found}")]
    TooFewPoints { required: usize, found: usize },

    #[error("expected exactly {expected} points in dimension {dim}, got {found}")]
    WrongPointCount { expected: usize, dim: usize, found: usize },

    #[error("points {0} and {1} coincide")]
    DuplicatePoints(usize, usize),

    #[error("{name} must be >= {min}, got {value}")]
    OutOfRange { name: &'static str, min: u64, value: u64 },

    #[error("certificate does not match configuration: {0}")]
    CertificateMismatch(String),

    #[error("inequality {name} violated: lhs {lhs} < rhs {rhs}")]
    InequalityViolated { name: &'static str, lhs: f64, rhs: f64 },

    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(String),
}

impl Error {
    /// Stable machine-readable name of the failed precondition.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidExponent(_) => "invalid_exponent",
            Error::UnsupportedExponent(_) => "unsupported_exponent",
            Error::NonFiniteCoordinate { .. } => "non_finite_coordinate",
            Error::EmptyPoint => "empty_point",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::TooFewPoints { .. } => "too_few_points",
            Error::WrongPointCount { .. } => "wrong_point_count",
            Error::DuplicatePoints(..) => "duplicate_points",
            Error::OutOfRange { .. } => "out_of_range",
            Error::CertificateMismatch(_) => "certificate_mismatch",
            Error::InequalityViolated { .. } => "inequality_violated",
            Error::NumericalBreakdown(_) => "numerical_breakdown",
        }
    }
}
