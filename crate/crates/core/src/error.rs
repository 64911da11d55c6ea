use thiserror::Error;

/// Errors raised by the numerical routes.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("size limit exceeded: {0}")]
    Size(String),
    #[error("degenerate or inadmissible contour geometry: {0}")]
    Geometry(String),
    #[error("non-finite kernel value at node pair ({row}, {col})")]
    Evaluation { row: usize, col: usize },
    #[error("singular system: {0}")]
    Singular(String),
    #[error("pole: {0}")]
    Pole(String),
    #[error("argument outside domain: {0}")]
    Domain(String),
    #[error("{what} did not converge: estimate {estimate:.3e} exceeds tolerance {tolerance:.3e}")]
    Convergence {
        what: String,
        estimate: f64,
        tolerance: f64,
    },
    #[error("series truncation: {0}")]
    Truncation(String),
    #[error("moment inversion failed: {0}")]
    Inversion(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn convergence(what: impl Into<String>, estimate: f64, tolerance: f64) -> Self {
        Error::Convergence {
            what: what.into(),
            estimate,
            tolerance,
        }
    }
}
