use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A trial or context violates its invariants.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Algorithms on one function report different trial counts.
    #[error("inconsistent trial count: {0}")]
    InconsistentTrialCount(String),

    /// Tables that must share one algorithm set do not.
    #[error("mismatched algorithm sets: {0}")]
    MismatchedAlgorithms(String),

    /// Input file does not follow the trial record schema.
    #[error("schema error at row {row}: {message}")]
    Schema { row: usize, message: String },

    /// A row failed trial validation against its function context.
    #[error("invalid trial at row {row}: {message}")]
    InvalidTrial { row: usize, message: String },

    /// A record names a (function, dimension) missing from the config.
    #[error("unknown function {function} (dimension {dimension})")]
    UnknownFunction { function: String, dimension: u32 },

    #[error("config error: {0}")]
    Config(String),

    /// Exact enumeration was requested beyond the configured size cap.
    #[error("sample sizes {n1}+{n2} exceed the enumeration cap {cap}; use the normal approximation")]
    EnumerationCap { n1: usize, n2: usize, cap: usize },

    #[error("empty report: {0}")]
    Empty(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable machine-readable class name, used by the CLI on failure.
    pub fn class(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "invalid-input",
            Error::InconsistentTrialCount(_) => "inconsistent-n",
            Error::MismatchedAlgorithms(_) => "mismatched-algorithms",
            Error::Schema { .. } => "schema",
            Error::InvalidTrial { .. } => "invalid-trial",
            Error::UnknownFunction { .. } => "unknown-function",
            Error::Config(_) => "config",
            Error::EnumerationCap { .. } => "enumeration-cap",
            Error::Empty(_) => "empty",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}
