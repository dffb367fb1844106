use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("index error: {0}")]
    Index(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("size guard exceeded: {0}")]
    Size(String),

    /// The reference amplitude of the coherent-state chart vanishes.
    #[error("chart singularity: {0}")]
    ChartSingularity(String),

    #[error("no symmetric witness above {tolerance:e}")]
    WitnessFailure { tolerance: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("malformed file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Format(err.to_string())
    }
}
