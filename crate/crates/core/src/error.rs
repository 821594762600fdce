use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("non-finite value in {what} at t = {time}")]
    BlowUp { what: String, time: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("leg at epsilon = {epsilon} failed: {source}")]
    Leg {
        epsilon: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("i/o error at {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    /// Whether the root cause is a numerical abort (blow-up guard).
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::BlowUp { .. } => true,
            Error::Leg { source, .. } => source.is_numerical(),
            _ => false,
        }
    }

    pub fn is_io(&self) -> bool {
        match self {
            Error::Io { .. } => true,
            Error::Leg { source, .. } => source.is_io(),
            _ => false,
        }
    }
}
