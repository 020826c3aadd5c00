use thiserror::Error;

/// Every failure the integrators, oracles and experiment runner can report.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("matrix is not symmetric (asymmetry {asymmetry:e} exceeds {bound:e})")]
    NonSymmetric { asymmetry: f64, bound: f64 },
    #[error(
        "{what} did not converge after {iterations} iterations (last residual {last_residual:e})"
    )]
    NoConvergence {
        what: &'static str,
        iterations: usize,
        last_residual: f64,
    },
    #[error("argument {z} is too close to the tan pole at (pi/2)^2")]
    PoleProximity { z: f64 },
    #[error("series argument has spectral bound {estimate} above the safe radius {radius}")]
    SeriesDivergence { estimate: f64, radius: f64 },
    #[error("potential is singular at radius {radius:e}")]
    SingularPoint { radius: f64 },
    #[error("discrete gradient pole: points are (nearly) antipodal, denominator ratio {ratio:e}")]
    AntipodalSingularity { ratio: f64 },
    #[error("quadrature with {nodes} nodes misses the requested accuracy: estimate {estimate:e} > {tolerance:e}")]
    QuadratureTolerance {
        nodes: usize,
        estimate: f64,
        tolerance: f64,
    },
    #[error("derivative of order {order} is not available for this potential")]
    DerivativeUnavailable { order: usize },
    #[error("no circular orbit at radius {radius}: R V'(R) = {centripetal} is not positive")]
    NoCircularOrbit { radius: f64, centripetal: f64 },
    #[error("trajectory ends at t = {actual}, expected t = {expected}")]
    TimeMismatch { expected: f64, actual: f64 },
    #[error("order fit is degenerate: {0}")]
    DegenerateFit(String),
    #[error("baseline cost is zero")]
    ZeroCost,
    #[error("step {step} failed: {source}")]
    StepFailed { step: usize, source: Box<Error> },
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid value for `{key}`: {message}")]
    Validation { key: String, message: String },
    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
