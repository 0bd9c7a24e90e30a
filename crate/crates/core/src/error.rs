use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid temperature: beta_homega must be positive, got {0}")]
    InvalidTemperature(f64),

    #[error("invalid tail epsilon {0}: must lie in (0, 1)")]
    InvalidTailEpsilon(f64),

    #[error("thermal truncation needs {levels} levels, more than the limit of {limit}")]
    TruncationTooLarge { levels: usize, limit: usize },

    #[error("invalid phase index m = {m} for truncation r = {r_trunc}")]
    InvalidPhaseIndex { r_trunc: usize, m: usize },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("configuration mismatch: {0}")]
    Mismatch(String),

    #[error("system state is mixed (purity {purity}); characteristic times need a pure initial state")]
    MixedState { purity: f64 },

    #[error("no decoherence: {0}")]
    NoDecoherence(String),

    #[error("full Hilbert space dimension {dim} exceeds the oracle size cap {cap}")]
    SizeCap { dim: usize, cap: usize },

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("invalid time series: {0}")]
    InvalidSeries(String),

    #[error("invalid configuration:\n{}", .0.join("\n"))]
    Validation(Vec<String>),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code used by the command-line driver.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::SizeCap { .. } => 3,
            _ => 1,
        }
    }
}
