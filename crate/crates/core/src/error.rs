use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument fell outside the domain of a model function.
    #[error("domain error: {0}")]
    Domain(String),

    /// A target SNR cannot be met at any positive distance.
    #[error("target SNR {target_db} dB is unreachable")]
    Unreachable { target_db: f64 },

    /// A structural invariant of a model type was violated. The first field
    /// names the violated field, e.g. `VideoProfile.fps`.
    #[error("invalid {0}: {1}")]
    Invalid(&'static str, String),

    #[error("result does not belong to scenario: {0}")]
    Mismatch(String),
}

impl Error {
    pub(crate) fn invalid(field: &'static str, msg: impl Into<String>) -> Self {
        Error::Invalid(field, msg.into())
    }
}
