use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A configuration value violates its invariant. `field` names the offending parameter.
    #[error("invalid `{field}`: {reason}")]
    InvalidConfig { field: &'static str, reason: String },

    #[error("delay extent of {extent:.1} samples exceeds the cap of {cap:.1} samples")]
    DelaySpanExceeded { extent: f64, cap: f64 },

    #[error("length mismatch: combined pulse has {combined} samples, ideal pulse has {ideal}")]
    LengthMismatch { combined: usize, ideal: usize },

    #[error("center mismatch: combined pulse centered at {combined}, ideal pulse at {ideal}")]
    CenterMismatch { combined: usize, ideal: usize },

    #[error("block length {len} is too large for the dense oracle (limit {limit})")]
    OracleTooLarge { len: usize, limit: usize },

    #[error("{0} never drops below half power within the angle grid")]
    NoHalfPowerCrossing(&'static str),
}

pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidConfig {
        field,
        reason: reason.into(),
    }
}
