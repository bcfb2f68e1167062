use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid game: {0}")]
    InvalidGame(String),

    #[error("not a probability vector: {0}")]
    NotSimplex(String),

    #[error("degenerate game: {0}")]
    Degenerate(String),

    #[error("no interior Nash equilibrium")]
    NoInteriorNash,

    #[error("invalid input: {0}")]
    Input(String),

    #[error("numerical failure at step {step}: {detail}")]
    Numerical { step: usize, detail: String },

    #[error("refused: {0}")]
    Refused(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code for the command line front end: 1 for bad input,
    /// 2 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Numerical { .. } => 2,
            _ => 1,
        }
    }
}
