use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("invalid frame: {0}")]
    InvalidFrame(String),

    #[error("frame {frame} has no optical flow but the feature scheme requires it")]
    MissingFlow { frame: u64 },

    #[error("dimension mismatch: {left} vs {right}")]
    Dimension { left: usize, right: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("pipeline error: {0}")]
    Pipeline(String),

    #[error("nothing to evaluate: no frame has valid prediction and ground truth")]
    EmptyEvaluation,

    #[error("{path}: line {line}: {msg}")]
    Schema { path: String, line: usize, msg: String },

    #[error("decode error: {0}")]
    Decode(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error("frame {frame}: {source}")]
    AtFrame {
        frame: u64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// Wraps `self` with the index of the frame that was being processed.
    pub fn at_frame(self, frame: u64) -> Self {
        match self {
            e @ Error::AtFrame { .. } => e,
            e => Error::AtFrame {
                frame,
                source: Box::new(e),
            },
        }
    }

    /// True for errors caused by bad parameters or malformed user-supplied
    /// tables, as opposed to unreadable or undecodable input media.
    pub fn is_config(&self) -> bool {
        match self {
            Error::InvalidGeometry(_)
            | Error::Dimension { .. }
            | Error::Config(_)
            | Error::EmptyEvaluation
            | Error::Schema { .. } => true,
            Error::AtFrame { source, .. } => source.is_config(),
            _ => false,
        }
    }
}
