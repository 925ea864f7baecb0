use thiserror::Error;

/// Failures raised by the classifiers, oracles and builders.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("eigenvalue iteration did not converge (residual {residual:e})")]
    ConvergenceFailure { residual: f64 },

    #[error("search budget of {budget} candidates exhausted")]
    BudgetExhausted { budget: u64 },

    #[error("cannot decide: {0}")]
    Undecidable(String),

    #[error("weight criterion unresolved: {0}")]
    UnresolvedCriterion(String),

    #[error("zero vector has no informative orbit")]
    ZeroVector,

    #[error("symbol does not map the unit disk into itself: {0}")]
    NotSelfMap(String),

    #[error("degenerate linear fractional map (ad - bc = 0)")]
    DegenerateMap,

    #[error("grid too coarse: {got} points, need at least {need}")]
    GridTooCoarse { got: usize, need: usize },

    #[error("unknown law `{0}`")]
    UnknownLaw(String),

    #[error("internal inconsistency: {0}")]
    InconsistentVerdicts(String),

    #[error("certification failed: {0}")]
    CertificationFailure(String),

    #[error("i/o failure: {0}")]
    IoFailure(String),
}

impl Error {
    /// True for failures caused by numerics rather than by the input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::ConvergenceFailure { .. } | Error::BudgetExhausted { .. } | Error::CertificationFailure(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::IoFailure(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
