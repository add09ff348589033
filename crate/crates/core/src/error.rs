use thiserror::Error;

/// Errors raised by the numerical modules.
#[derive(Debug, Error)]
pub enum Error {
    /// An enumeration would scan more candidates than the configured budget.
    #[error("capacity exceeded: {what} needs {needed} candidate checks, budget is {budget}")]
    Capacity {
        what: &'static str,
        needed: u128,
        budget: u64,
    },

    #[error("mode ({px},{py}) is outside the mode set of radius {radius}")]
    ModeOutside { px: i64, py: i64, radius: u32 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("shape mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: usize, got: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// A non-finite value appeared during time stepping.
    #[error("non-finite value after step {step} (t = {time})")]
    NonFinite { step: usize, time: f64 },

    #[error("time {requested} is outside the stored trajectory [{start}, {end}]")]
    TimeOutOfRange { requested: f64, start: f64, end: f64 },

    /// The x-box cannot hold the rescaled profile.
    #[error("box too small: boundary mass fraction {fraction:e} exceeds {limit:e}")]
    BoxTooSmall { fraction: f64, limit: f64 },

    #[error("undefined quantity: {0}")]
    Undefined(String),

    #[error("checkpoint format: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
