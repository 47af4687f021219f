use thiserror::Error;

/// Errors produced by the symmetrization and verification routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("intervals overlap: [{left_lo}, {left_hi}] and [{right_lo}, {right_hi}]")]
    Overlap {
        left_lo: f64,
        left_hi: f64,
        right_lo: f64,
        right_hi: f64,
    },

    #[error("invalid interval: center {center}, half-length {half_length}")]
    InvalidInterval { center: f64, half_length: f64 },

    #[error("invalid time {0}: must be nonnegative (or +inf)")]
    InvalidTime(f64),

    #[error("axis {axis} out of range for a {dim}-dimensional grid")]
    AxisOutOfRange { axis: usize, dim: usize },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("symmetrized support leaves the grid along axis {axis}")]
    SupportEscapesGrid { axis: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("value {value} outside the domain [{lo}, {hi}]")]
    OutOfDomain { value: f64, lo: f64, hi: f64 },

    #[error("vanishing gradient on the level band around {level}")]
    DegenerateLevel { level: f64 },

    #[error("test function support leaves the interior of the support of u")]
    SupportViolation,

    #[error("empty boundary band")]
    EmptyBand,

    #[error("grid of {requested} values exceeds the configured cap of {cap}")]
    ResourceGuard { requested: usize, cap: usize },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
