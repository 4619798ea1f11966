use std::path::PathBuf;

/// Errors raised anywhere in the laboratory.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("argument error: {0}")]
    Argument(String),

    /// The computational domain cuts off a field that has not decayed.
    #[error("truncation warning: {what} has magnitude {magnitude:.3e} at the grid boundary")]
    Truncation { what: String, magnitude: f64 },

    #[error("solver error: {0}")]
    Solver(String),

    #[error("state error: {0}")]
    State(String),

    #[error("range error: {0}")]
    Range(String),

    /// Positivity of the specific volume was lost during time stepping.
    #[error("blow-up at t = {t:.6}: v = {v:.3e} at x = {x:.4}")]
    BlowUp { t: f64, x: f64, v: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("data error: {0}")]
    Data(String),

    #[error("schema error: {0}")]
    Schema(String),

    /// Every violation found while validating a configuration.
    #[error("invalid configuration:\n  {}", .0.join("\n  "))]
    Validation(Vec<String>),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
