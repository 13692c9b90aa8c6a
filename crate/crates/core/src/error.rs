use std::io;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid panel spec: {0}")]
    InvalidSpec(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A Monte Carlo guard refused to run: too few replicates for the
    /// requested precision.
    #[error("{guard}: {reps} replicates requested, at least {required} required")]
    InsufficientReplicates {
        guard: &'static str,
        reps: u64,
        required: u64,
    },

    #[error("weight constraints violated on rows {rows:?}")]
    WeightConstraint { rows: Vec<usize> },

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("panel format: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub fn spec(msg: impl Into<String>) -> Self {
        Error::InvalidSpec(msg.into())
    }

    pub fn arg(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
