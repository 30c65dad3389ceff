use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("eigensolver did not converge after {iterations} sweeps")]
    Numeric { iterations: usize },

    #[error("degenerate eigenspace: projector diagonal entry {index} is {value:e}")]
    DegenerateEigenspace { index: usize, value: f64 },

    #[error("singular principal minor (lambda_min = {lambda_min:e}) on index set {indices:?}")]
    SingularMinor { indices: Vec<usize>, lambda_min: f64 },

    #[error("combinatorial budget exceeded: {required} > {limit}")]
    Budget { required: u128, limit: u128 },

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
