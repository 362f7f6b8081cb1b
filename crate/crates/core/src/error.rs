use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// A scalar argument fell outside the domain the operation is defined on.
    #[error("{what} = {value} is outside the allowed domain {domain}")]
    OutOfDomain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("unphysical state: {0}")]
    Unphysical(String),

    #[error("component {index} is negative ({value})")]
    NegativeComponent { index: usize, value: f64 },

    #[error("component {index} is not a finite number")]
    NonFinite { index: usize },

    #[error("vector lengths differ ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },

    #[error("observables are parallel or anti-parallel; the overlap constant is undefined")]
    DegeneratePair,

    #[error("total beam intensity is zero")]
    ZeroIntensity,

    #[error("invalid sweep: {0}")]
    InvalidSpec(String),

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn out_of_domain<T>(what: &'static str, value: f64, domain: &'static str) -> Result<T> {
    Err(Error::OutOfDomain {
        what,
        value,
        domain,
    })
}
