use std::io;

use thiserror::Error;

use crate::params::Regime;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// An operation was called outside the regime its limit theorem covers.
    #[error(
        "{operation} requires the {required} regime ({condition}); got alpha = {alpha} ({found})"
    )]
    RegimeMismatch {
        operation: &'static str,
        required: &'static str,
        condition: &'static str,
        alpha: f64,
        found: Regime,
    },

    #[error("horizon {requested} exceeds the available horizon {available}")]
    Horizon { requested: usize, available: usize },

    #[error("{0} is undefined for these parameters")]
    Undefined(&'static str),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
