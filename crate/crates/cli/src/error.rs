use std::fmt;

use qrs_core::Error as CoreError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_OTHER: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_INVALID: i32 = 4;

#[derive(Debug)]
pub enum CliError {
    /// Bad configuration or a violated module precondition.
    Config(String),
    /// Failure inside a numerical module.
    Core { module: &'static str, source: CoreError },
    Io(std::io::Error),
    Json(serde_json::Error),
    Csv(csv::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Core { module, source } => write!(f, "{module}: {source}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
            CliError::Json(e) => write!(f, "json error: {e}"),
            CliError::Csv(e) => write!(f, "csv error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Json(e)
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Csv(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Core { source, .. } => match source {
                CoreError::Capacity { .. }
                | CoreError::ModeOutside { .. }
                | CoreError::InvalidGrid(_)
                | CoreError::ShapeMismatch { .. }
                | CoreError::InvalidParameter { .. }
                | CoreError::Format(_) => EXIT_CONFIG,
                CoreError::NonFinite { .. } | CoreError::Undefined(_) | CoreError::TimeOutOfRange { .. } => {
                    EXIT_NUMERICAL
                }
                CoreError::BoxTooSmall { .. } => EXIT_INVALID,
                CoreError::Io(_) => EXIT_OTHER,
            },
            CliError::Io(_) | CliError::Json(_) | CliError::Csv(_) => EXIT_OTHER,
        }
    }
}

/// Tags core errors with the module that raised them.
pub trait InModule<T> {
    fn in_module(self, module: &'static str) -> Result<T, CliError>;
}

impl<T> InModule<T> for qrs_core::Result<T> {
    fn in_module(self, module: &'static str) -> Result<T, CliError> {
        self.map_err(|source| CliError::Core { module, source })
    }
}
