use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RisError {
    /// An argument is outside the domain of the model it feeds.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("length mismatch: expected {expected} elements, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    /// The gain pattern never falls to the floor inside the coverage sector.
    #[error("pattern steered at {steering_deg:.3} deg never falls to {floor_db:.3} dB inside the sector; lower the floor")]
    NoCrossing { steering_deg: f64, floor_db: f64 },

    /// The requested gain level is above what the design delivers at its own steering angle.
    #[error("threshold {threshold_db:.3} dB exceeds the {peak_db:.3} dB delivered at the steering angle")]
    ThresholdAbovePeak { threshold_db: f64, peak_db: f64 },

    /// A beam falls to the level right where it is steered, so the walk cannot advance.
    #[error("beam steered at {at_deg:.3} deg only touches {level_db:.3} dB at its peak; coverage cannot advance")]
    Stalled { at_deg: f64, level_db: f64 },

    #[error("{what}: {requested} exceeds the configured cap of {cap}")]
    CapExceeded {
        what: &'static str,
        requested: usize,
        cap: usize,
    },
}

pub type Result<T, E = RisError> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> RisError {
    RisError::Domain(msg.into())
}
