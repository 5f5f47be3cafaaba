use thiserror::Error;

/// Everything that can go wrong in the library.
///
/// The CLI maps [`Error::is_budget_or_numerical`] failures to exit status 2 and
/// everything else to exit status 1.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not symmetric: entry ({row},{col}) = {upper} but ({col},{row}) = {lower}")]
    NotSymmetric {
        row: usize,
        col: usize,
        upper: f64,
        lower: f64,
    },

    #[error("index {index} out of range for dimension {n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("dimension {n} exceeds the exhaustive-search budget of {limit}")]
    Budget { n: usize, limit: usize },

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {residual:e})")]
    NoConvergence { sweeps: usize, residual: f64 },

    #[error("heuristic incomplete: serial dynamics hit the step limit of {max_sweeps} sweeps")]
    HeuristicIncomplete { max_sweeps: usize },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Error {
    pub fn is_budget_or_numerical(&self) -> bool {
        matches!(
            self,
            Error::Budget { .. } | Error::NoConvergence { .. } | Error::HeuristicIncomplete { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
