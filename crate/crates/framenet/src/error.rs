use thiserror::Error;

/// Errors raised across the library.
///
/// The CLI maps [`Error::is_input`] variants to exit code 1 and everything
/// else to exit code 2.
#[derive(Debug, Error)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("degenerate frame: condition number {0:.3e} exceeds threshold")]
    DegenerateFrame(f64),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("infeasible budget: {0}")]
    InfeasibleBudget(String),
    #[error("coercivity violated: {0}")]
    Coercivity(String),
    #[error("solver error: {0}")]
    Solver(String),
    #[error("training error: {0}")]
    Training(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    /// True for errors caused by bad user input rather than a runtime failure.
    pub fn is_input(&self) -> bool {
        matches!(
            self,
            Error::Input(_)
                | Error::Dimension { .. }
                | Error::Unsupported(_)
                | Error::Coercivity(_)
                | Error::InfeasibleBudget(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::Dimension { expected, got })
    }
}
