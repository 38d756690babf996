use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("no positive solution: omega >= omega_p (omega = {omega}, omega_p = {omega_p})")]
    NoSolution { omega: f64, omega_p: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid bracket: {0}")]
    BracketInvalid(String),

    #[error("integration failed: {0}")]
    Integration(String),
}

impl Error {
    /// Process exit code for the command line front end: 1 for bad or
    /// out-of-existence parameters, 2 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParams(_)
            | Error::Domain(_)
            | Error::NoSolution { .. }
            | Error::Precondition(_) => 1,
            Error::BracketInvalid(_) | Error::Integration(_) => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
