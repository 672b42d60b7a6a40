use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unknown method `{0}` (expected one of RKN4, RKN5, RKN10)")]
    UnknownMethod(String),

    #[error("unknown problem `{0}` (expected exp1000 or sho)")]
    UnknownProblem(String),

    #[error("malformed tableau `{name}`: {reason}")]
    MalformedTableau { name: String, reason: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite evaluation at x = {x:e}, y = {y:?}{}", stage.map(|s| format!(" (stage {s})")).unwrap_or_default())]
    Evaluation {
        x: f64,
        y: Vec<f64>,
        stage: Option<usize>,
    },

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("stepsize must be positive and finite, got {0:e}")]
    InvalidStepsize(f64),

    #[error("integration endpoint {x_end:e} does not lie beyond the start {x0:e}")]
    InvalidInterval { x0: f64, x_end: f64 },

    #[error("invalid method combination: {0}")]
    InvalidMethods(String),

    #[error("stepsize underflow at x = {x:e}: h = {h:e}")]
    StepsizeUnderflow { x: f64, h: f64 },

    #[error("{count} consecutive step rejections at x = {x:e}")]
    RejectionStorm { x: f64, count: usize },

    #[error(
        "global tolerance infeasible: quenched at {count} consecutive nodes ending at x = {x:e}"
    )]
    ToleranceInfeasible { x: f64, count: usize },

    #[error("a reference solution is required")]
    MissingReference,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("i/o failure: {0}")]
    Io(String),
}

impl Error {
    /// Failures raised while integrating, as opposed to bad input.
    pub fn is_integration_failure(&self) -> bool {
        matches!(
            self,
            Error::Evaluation { .. }
                | Error::StepsizeUnderflow { .. }
                | Error::RejectionStorm { .. }
                | Error::ToleranceInfeasible { .. }
        )
    }
}

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
