use thiserror::Error;

/// Errors raised by the estimators, tests and simulation harness.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum UrError {
    #[error("series too short: length {len}, need at least {min}")]
    SeriesTooShort { len: usize, min: usize },

    #[error("series contains a non-finite value at position {index}")]
    NonFiniteValue { index: usize },

    #[error("blocklength {blocklength} infeasible for series of length {len} (need 2 <= B < T)")]
    SchemeInfeasible { blocklength: usize, len: usize },

    #[error("invalid block scheme parameter: {0}")]
    BadScheme(String),

    #[error("design matrix is rank deficient (singular value ratio {ratio:.3e})")]
    RankDeficient { ratio: f64 },

    #[error("degenerate series: all within-block deviations vanish")]
    DegenerateSeries,

    #[error("degenerate residuals: zero residual variance")]
    DegenerateResiduals,

    #[error("variance profile is degenerate: flat over {fraction:.1}% of the sample")]
    ProfileDegenerate { fraction: f64 },

    #[error("lag order {lag} too large for series of length {len}")]
    LagTooLarge { lag: usize, len: usize },

    #[error("non-finite intermediate in {0}")]
    NonFinite(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("experiment aborted: test `{test}` failed on {failures} of {reps} replications (first error: {first})")]
    ExperimentAborted {
        test: String,
        failures: usize,
        reps: usize,
        first: String,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for UrError {
    fn from(err: std::io::Error) -> Self {
        UrError::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, UrError>;
