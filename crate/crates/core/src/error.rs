use thiserror::Error;

/// Errors raised by the geometry, metric, bound and gauge routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("non-finite coordinate {value} at index {index}")]
    NonFinite { index: usize, value: f64 },

    #[error("invalid body: {0}")]
    InvalidBody(String),

    #[error("point is not strictly interior to the body (depth {depth:e}, required > {margin:e})")]
    NotInterior { depth: f64, margin: f64 },

    #[error("ray exit parameter {tau} is within 1e-12 of 1; the point is numerically on the boundary")]
    NearBoundary { tau: f64 },

    #[error("direction is a recession direction; the boundary point does not exist")]
    UnboundedDirection,

    #[error("chord is unbounded on at least one side")]
    UnboundedChord,

    #[error("simplex exceeded the pivot limit of {limit}")]
    PivotLimit { limit: usize },

    #[error("sampling budget exhausted: {0}")]
    Sampling(String),

    #[error("generator failed: {0}")]
    Generator(String),

    #[error("invalid range: m = {m}, M = {big_m} (need m <= M)")]
    InvalidRange { m: f64, big_m: f64 },

    #[error("function value {value} outside declared range [{m}, {big_m}]")]
    RangeViolation { value: f64, m: f64, big_m: f64 },

    #[error("function is clamped at its floor at the query point; 0 is a subgradient")]
    ClampedPoint,

    #[error("point {index}: {source}")]
    Point {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("entry ({row}, {col}): {source}")]
    MatrixEntry {
        row: usize,
        col: usize,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
