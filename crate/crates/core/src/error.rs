use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex {v} out of range for n={n}")]
    VertexOutOfRange { v: u32, n: usize },

    #[error("triple {0:?} repeats a vertex")]
    RepeatedVertex([u32; 3]),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("exhaustive audit needs n <= {cap}, got n = {n}")]
    ExhaustiveCap { n: usize, cap: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("retries exhausted: {0}")]
    RetriesExhausted(String),

    #[error("no unused absorber serves vertex {0}")]
    NoServer(u32),

    #[error("stage {stage} failed: {detail}")]
    Stage { stage: &'static str, detail: String },
}
