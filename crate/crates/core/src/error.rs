use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not stochastic: {0}")]
    NotStochastic(String),
    #[error("limiting transition matrix is reducible")]
    Reducible,
    #[error("drift is not centered: sum_i pi_i d_i = {weighted:e} exceeds tolerance {tol:e}")]
    NonCentered { weighted: f64, tol: f64 },
    #[error("sum_i pi_i u_i = {weighted:e} does not have the requested sign")]
    WrongSign { weighted: f64 },
    #[error("operation requires regime {expected}, coefficients are in regime {actual}")]
    WrongRegime { expected: String, actual: String },
    #[error("degenerate effective variance V = {v:e}")]
    Degenerate { v: f64 },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("too few uncensored samples: {found} < {required}")]
    TooFewSamples { found: usize, required: usize },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
