use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A packet (or an intermediate image of it) leaks into the box edges,
    /// where periodic images would contaminate the result.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("representation mismatch: expected {expected} representation, found {found}")]
    Representation {
        expected: &'static str,
        found: &'static str,
    },

    #[error("undefined phase: overlap magnitude {0:e} is below 1e-6")]
    UndefinedPhase(f64),

    #[error("malformed path: {0}")]
    MalformedPath(String),

    #[error("invalid k update at step {step}: {reason}")]
    InvalidUpdate { step: usize, reason: String },

    #[error("cross-over at step {step}: shell branch would change from {from} to {to}")]
    CrossOver {
        step: usize,
        from: &'static str,
        to: &'static str,
    },

    #[error("invalid moments: {0}")]
    InvalidMoments(String),

    #[error("undefined residual: bare mass squared vanishes (light-cone state)")]
    UndefinedResidual,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Stable, machine-parsable name of the error class.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "invalid-argument",
            Error::Domain(_) => "domain",
            Error::Representation { .. } => "representation",
            Error::UndefinedPhase(_) => "undefined-phase",
            Error::MalformedPath(_) => "malformed-path",
            Error::InvalidUpdate { .. } => "invalid-update",
            Error::CrossOver { .. } => "cross-over",
            Error::InvalidMoments(_) => "invalid-moments",
            Error::UndefinedResidual => "undefined-residual",
            Error::Io(_) => "io",
            Error::Csv(_) => "csv",
        }
    }
}
