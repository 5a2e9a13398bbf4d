use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("window of length {requested} exceeds the memory budget of {budget} entries")]
    Capacity { requested: u64, budget: u64 },

    #[error("index {n} is outside the table window [{start}, {end})")]
    OutOfWindow { n: u64, start: u64, end: u64 },

    #[error("table window [{have_start}, {have_end}) does not cover the required range [{need_start}, {need_end})")]
    Coverage {
        have_start: u64,
        have_end: u64,
        need_start: u64,
        need_end: u64,
    },

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("quadrature budget exceeded: k*H = {0} > 10000")]
    QuadratureBudget(u64),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParams(msg.into())
    }
}
