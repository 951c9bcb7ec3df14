//! Error type shared by all modules of the crate.

use crate::params::Violation;

/// Crate-wide error enum.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument fell outside the mathematical domain of an operation.
    #[error("domain error: {what} = {value} outside {expected}")]
    Domain {
        what: &'static str,
        value: f64,
        expected: &'static str,
    },

    /// A grid grading descriptor failed its own sanity checks.
    #[error("invalid grading descriptor: {0}")]
    InvalidGrading(String),

    /// The requested weight exponent makes the integral diverge at the origin.
    #[error("integrability violation: weight exponent {gamma} with dimension {dim} (needs gamma > -dim)")]
    NotIntegrable { gamma: f64, dim: u32 },

    /// A quotient denominator was too small to divide by.
    #[error("zero denominator in {0}")]
    ZeroDenominator(&'static str),

    /// Parameter validation failed; the violations name each broken constraint.
    #[error("parameter validation failed: {0:?}")]
    Validation(Vec<Violation>),

    /// An iterative method ran out of its iteration budget.
    #[error("no convergence after {iterations} iterations (stationarity {stationarity:.3e})")]
    NonConvergence {
        iterations: usize,
        stationarity: f64,
    },

    /// The initial iterate vanished after normalization.
    #[error("degenerate initial iterate (zero after normalization)")]
    DegenerateInit,

    /// An exponent was outside the range an operation supports.
    #[error("exponent out of range: {what} = {value}")]
    ExponentOutOfRange { what: &'static str, value: f64 },

    /// The shooting trajectory never crossed zero before the cap.
    #[error("no sign change before t = {t_cap} for shooting value {s0}")]
    NoSignChange { s0: f64, t_cap: f64 },

    /// The ODE integrator could not keep its error estimate under control.
    #[error("ODE step failure near t = {t}")]
    OdeStepFailure { t: f64 },

    /// A Dirichlet datum was expected but the input does not vanish at the boundary.
    #[error("non-Dirichlet input: |u(T)| = {boundary_value:.3e} exceeds tolerance")]
    NonDirichlet { boundary_value: f64 },

    /// Euclidean-radius and geodesic-radius evaluations of the same term disagree.
    #[error("coordinate cross-check failed for {term}: relative disagreement {rel:.3e}")]
    CoordinateMismatch { term: &'static str, rel: f64 },

    /// A concentrating-family scale fell below what the grid can resolve.
    #[error("family underflow: epsilon = {epsilon:.3e} below grid resolution")]
    FamilyUnderflow { epsilon: f64 },

    /// The integrand tail at the truncation radius is too large to trust the integral.
    #[error("tail too fat at truncation radius: indicator {indicator:.3e}")]
    TailTooFat { indicator: f64 },

    /// Linear algebra breakdown (singular or indefinite where SPD was required).
    #[error("linear solve breakdown: {0}")]
    LinearSolve(&'static str),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    /// Malformed CSV input.
    #[error("csv parse error: {0}")]
    Csv(String),
}

pub type Result<T> = std::result::Result<T, Error>;
