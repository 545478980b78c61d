use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("non-finite coefficient at mode {mode}")]
    NonFinite { mode: usize },

    #[error("matrix size {requested} exceeds the {available} stored modes")]
    Truncation { requested: usize, available: usize },

    #[error("matrix is not Hermitian: max |m - m^*| = {deviation:e}")]
    NonHermitian { deviation: f64 },

    #[error("solution blew up at t = {t}")]
    BlowUp { t: f64 },

    #[error("state is not in W: ratio deviation {deviation:e}")]
    NotInW { deviation: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("fit error: {0}")]
    Fit(String),

    #[error("fixed-point iteration diverged after {iterations} iterations (change {change:e}); try a larger T_start")]
    FixedPointDivergence { iterations: usize, change: f64 },

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
