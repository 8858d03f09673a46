use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit count {got} outside supported range {min}..={max}")]
    Size { got: usize, min: usize, max: usize },

    #[error("contract violated: {0}")]
    Contract(String),

    #[error("eigensolver did not converge after {iterations} iterations (residuals {residuals:?})")]
    NoConvergence { iterations: usize, residuals: Vec<f64> },

    #[error("trial state is orthogonal to the degenerate ground subspace (projection norm {0:.3e})")]
    OrthogonalToSubspace(f64),

    #[error("invalid config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn contract<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Contract(msg.into()))
}
