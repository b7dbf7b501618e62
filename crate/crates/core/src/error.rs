use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("approximation requires total dephasing rate above amplitude damping rate (Γ2′ = {gamma2_prime}, Γ1 = {gamma1})")]
    DephasingBelowDamping { gamma2_prime: f64, gamma1: f64 },

    #[error("parameters fall outside the completely positive regime: {0}")]
    NotCompletelyPositive(String),

    #[error("decay series is malformed: {0}")]
    Series(String),

    #[error("not enough data: need at least {needed}, got {got}")]
    NotEnoughData { needed: usize, got: usize },

    #[error("config error at line {line}: {reason}")]
    Config { line: usize, reason: String },

    #[error("unknown experiment `{0}`")]
    UnknownExperiment(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
