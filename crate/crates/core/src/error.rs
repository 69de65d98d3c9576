use thiserror::Error;

/// Broad class of a failure: caller misuse or a numerical/domain limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Usage,
    Domain,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DdcError {
    #[error("invalid carrier: {0}")]
    InvalidCarrier(String),
    #[error("invalid filter: {0}")]
    InvalidFilter(String),
    #[error("non-finite sample at index {0}")]
    NonFinite(i64),
    #[error("{0}")]
    Usage(String),
    #[error("reconstruction is singular: |sin(delta)| = {sin_delta:e} is below 1e-9")]
    Singular { sin_delta: f64 },
    #[error("unstable stage: pole magnitude {0} is not below 1")]
    Unstable(f64),
    #[error(
        "unachievable target {target_db} dB: achievable range is ({min_db:.4} dB, {max_db:.4} dB)"
    )]
    Unachievable {
        target_db: f64,
        min_db: f64,
        max_db: f64,
    },
    #[error("response magnitude {magnitude:e} at theta = {theta} is too small for a phase")]
    ResponseZero { theta: f64, magnitude: f64 },
}

impl DdcError {
    pub fn kind(&self) -> ErrorKind {
        match self {
            DdcError::InvalidCarrier(_)
            | DdcError::InvalidFilter(_)
            | DdcError::NonFinite(_)
            | DdcError::Usage(_) => ErrorKind::Usage,
            DdcError::Singular { .. }
            | DdcError::Unstable(_)
            | DdcError::Unachievable { .. }
            | DdcError::ResponseZero { .. } => ErrorKind::Domain,
        }
    }

    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        DdcError::Usage(msg.into())
    }
}

pub type Result<T, E = DdcError> = std::result::Result<T, E>;
