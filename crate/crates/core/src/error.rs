use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid truncation: n_max = {0} (need at least {1})")]
    InvalidTruncation(usize, usize),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("ambiguous steady state: {0}")]
    AmbiguousSteadyState(String),

    #[error("linear solve failed: {0}")]
    SolverFailure(String),

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("integrator failure at t = {t:.6e}: {reason}")]
    Stiffness { t: f64, reason: String },

    #[error("undefined correlation: {0}")]
    UndefinedCorrelation(String),

    #[error("window too short: |C(t_end)| = {tail:.3e} exceeds {threshold:.3e}")]
    WindowTooShort { tail: f64, threshold: f64 },

    #[error("degenerate parameters: {0}")]
    DegenerateParameters(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit status for the command-line front end: 2 for invalid
    /// input, 3 for solver failures, 4 for convergence or window failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidTruncation(..)
            | Error::InvalidParams(_)
            | Error::InvalidGrid(_)
            | Error::Config(_)
            | Error::DegenerateParameters(_)
            | Error::Io(_) => 2,
            Error::Stiffness { .. } | Error::WindowTooShort { .. } => 4,
            _ => 3,
        }
    }
}
