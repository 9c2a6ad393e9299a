use thiserror::Error;

/// Errors raised anywhere in the simulator core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate channel: {0} has zero norm")]
    DegenerateChannel(&'static str),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("rank deficient: {0}")]
    RankDeficient(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("codebook of {bits} bits exceeds the {max}-bit limit")]
    BudgetTooLarge { bits: u32, max: u32 },

    #[error("invalid experiment spec: {message} (hint: {hint})")]
    InvalidSpec { message: String, hint: String },
}

pub type Result<T> = std::result::Result<T, Error>;
