use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed input: wrong shapes, non-Hermitian matrices, bad partitions.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A dimension or site count exceeded the configured maximum.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// The integrator produced a state outside the positive cone.
    #[error("integration failed at t = {time}: minimum eigenvalue {min_eigenvalue:e} below -1e-6")]
    Integration { time: f64, min_eigenvalue: f64 },
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub(crate) fn capacity(msg: impl Into<String>) -> Self {
        Error::Capacity(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
