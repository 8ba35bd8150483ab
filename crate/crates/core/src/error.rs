use thiserror::Error;

/// Failure modes shared by every module.
///
/// Variants split into two classes: precondition/validation failures
/// (bad input, violated assumptions) and numerical failures (a computation
/// that was well posed but did not converge). See [`Error::is_numerical`].
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("quadrature did not converge: estimate {estimate}, error {error:e} after {subdivisions} subdivisions")]
    NonConvergence {
        estimate: f64,
        error: f64,
        subdivisions: usize,
    },

    #[error("non-finite function value at x = {x}")]
    NonFinite { x: f64 },

    #[error("invalid bracket [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    InvalidBracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("root solver exhausted {iterations} iterations")]
    RootIterationLimit { iterations: usize },

    #[error("matrix is not symmetric (asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },

    #[error("unknown density family `{0}`")]
    UnknownFamily(String),

    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: String,
        value: f64,
        reason: String,
    },

    #[error("x = {x} lies outside the support interior ({a}, {b})")]
    OutOfSupport { x: f64, a: f64, b: f64 },

    #[error("score is not differentiable at x = {x}")]
    NonDifferentiablePoint { x: f64 },

    #[error("function is not integrable: {0}")]
    NotIntegrable(String),

    #[error("density `{name}` is not symmetric about 0")]
    DensityNotSymmetric { name: String },

    #[error("sample is empty")]
    EmptySample,

    #[error("tail integral diverges for `{0}` (E|X| not finite)")]
    HeavyTail(String),

    #[error("density `{name}` is not strictly log-concave: (-score)' = {slope:e} at x = {x}")]
    NotStrictlyLogConcave { name: String, x: f64, slope: f64 },

    #[error("density `{name}` is not log-concave: score increases near x = {x}")]
    NotLogConcave { name: String, x: f64 },

    #[error("score equation has no sign change: {0}")]
    NoCrossing(String),

    #[error("score of `{name}` is not monotone on the evaluation grid")]
    NotMonotone { name: String },

    #[error("normalization failed: {0}")]
    NormalizationFailure(String),

    #[error("base density is degenerate: largest information eigenvalue {0:e}")]
    DegenerateBase(f64),

    #[error("parity violation: {0}")]
    ParityViolation(String),

    #[error("operator `{kind}` is not valid for target `{target}`: {reason}")]
    InvalidOperator {
        kind: String,
        target: String,
        reason: String,
    },

    #[error("sample size {got} is below the minimum {min}")]
    SampleTooSmall { got: usize, min: usize },

    #[error("parse error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable machine-readable identifier.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NonConvergence { .. } => "NON_CONVERGENCE",
            Error::NonFinite { .. } => "NON_FINITE",
            Error::InvalidBracket { .. } => "INVALID_BRACKET",
            Error::RootIterationLimit { .. } => "ROOT_ITERATION_LIMIT",
            Error::NotSymmetric { .. } => "NOT_SYMMETRIC",
            Error::UnknownFamily(_) => "UNKNOWN_FAMILY",
            Error::InvalidParameter { .. } => "INVALID_PARAMETER",
            Error::OutOfSupport { .. } => "OUT_OF_SUPPORT",
            Error::NonDifferentiablePoint { .. } => "NON_DIFFERENTIABLE_POINT",
            Error::NotIntegrable(_) => "NOT_INTEGRABLE",
            Error::DensityNotSymmetric { .. } => "DENSITY_NOT_SYMMETRIC",
            Error::EmptySample => "EMPTY_SAMPLE",
            Error::HeavyTail(_) => "HEAVY_TAIL",
            Error::NotStrictlyLogConcave { .. } => "NOT_STRICTLY_LOG_CONCAVE",
            Error::NotLogConcave { .. } => "NOT_LOG_CONCAVE",
            Error::NoCrossing(_) => "NO_CROSSING",
            Error::NotMonotone { .. } => "NOT_MONOTONE",
            Error::NormalizationFailure(_) => "NORMALIZATION_FAILURE",
            Error::DegenerateBase(_) => "DEGENERATE_BASE",
            Error::ParityViolation(_) => "PARITY_VIOLATION",
            Error::InvalidOperator { .. } => "INVALID_OPERATOR",
            Error::SampleTooSmall { .. } => "SAMPLE_TOO_SMALL",
            Error::Parse { .. } => "PARSE",
            Error::Config(_) => "CONFIG",
            Error::Io(_) => "IO",
        }
    }

    /// True for failures of a numerical procedure on valid input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. }
                | Error::NonFinite { .. }
                | Error::RootIterationLimit { .. }
                | Error::NotIntegrable(_)
                | Error::HeavyTail(_)
                | Error::NormalizationFailure(_)
                | Error::DegenerateBase(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
