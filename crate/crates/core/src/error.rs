use thiserror::Error;

/// Errors raised by grid construction, operators and the verification harness.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("points per axis must be odd, got {0}")]
    EvenGrid(usize),
    #[error("points per axis must be at least 3, got {0}")]
    TooFewPoints(usize),
    #[error("half width must be positive and finite, got {0}")]
    NonPositiveHalfWidth(f64),
    #[error("unsupported dimension {0}, expected 1, 2 or 3")]
    UnsupportedDim(usize),
    #[error("operands live on different grids")]
    DomainMismatch,
    #[error("undefined sum of +inf and -inf")]
    UndefinedSum,
    #[error("NaN is not an extended real")]
    NotANumber,
    #[error("negative value {value} at node {index}")]
    NegativeValue { index: usize, value: f64 },
    #[error("expected {expected} samples, got {got}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("non-finite point coordinate")]
    NonFiniteCoordinate,
    #[error("point has {got} coordinates, expected {expected}")]
    PointDimension { expected: usize, got: usize },
    #[error("value ladder is empty")]
    EmptyLadder,
    #[error("invalid Young function: {0}")]
    InvalidYoung(String),
    #[error("Young function has no inverse")]
    NotInvertible,
    #[error("time must be positive, got {0}")]
    NonPositiveTime(f64),
    #[error("Hamiltonian kind not supported here: {0}")]
    WrongHamiltonian(String),
    #[error("initial datum is not convex")]
    NotConvex,
    #[error("operand must be bounded below on nodes")]
    NotBoundedBelow,
    #[error("need at least {needed} time samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("degenerate dual grid: {0}")]
    DegenerateDual(String),
    #[error("invalid specification: {0}")]
    InvalidSpec(String),
    #[error("sign condition fails at t = {t}: value {value}")]
    SignCondition { t: f64, value: f64 },
    #[error("i/o: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::InvalidSpec(e.to_string())
    }
}
