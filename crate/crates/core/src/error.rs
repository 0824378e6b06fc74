use thiserror::Error;

/// Errors produced by parameter validation and numeric routines.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A protocol, model, or operation argument is outside its domain.
    #[error("invalid parameter: {0}")]
    InvalidParams(String),
    /// A grid or sweep specification cannot be realized.
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    /// A matrix that must be positive semidefinite is not.
    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for errors caused by bad configuration rather than numerics.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::InvalidParams(_) | Error::InvalidGrid(_))
    }
}
