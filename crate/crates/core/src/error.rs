use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A scalar argument fell outside the domain the operation is defined on.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("shape mismatch: expected dimension {expected}, got {found}")]
    Shape { expected: usize, found: usize },

    #[error("invalid point: {0}")]
    InvalidPoint(String),

    /// The product of the β_{n+1} up to the required index vanished.
    #[error("psi0 undefined: some beta_(n+1) = 0 below index {upper}")]
    Psi0Undefined { upper: u64 },

    /// A rate composition needs a modulus the schedule does not declare.
    #[error("missing modulus for condition {0}")]
    MissingModulus(&'static str),

    #[error("schedule table exhausted: index {index} requested, table holds {len} entries")]
    ScheduleExhausted { index: u64, len: usize },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}
