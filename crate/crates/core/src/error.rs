use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("pole {index} is singular for the update scheme (|1 - alpha*tau| = {magnitude:e})")]
    SingularPole { index: usize, magnitude: f64 },

    #[error("relative permittivity at node {node} is not positive ({value})")]
    NonPositivePermittivity { node: usize, value: f64 },

    #[error("source is `{found}`, expected `{expected}`")]
    WrongSourceKind {
        expected: &'static str,
        found: &'static str,
    },

    #[error(
        "the Dirac-delta wave-function cannot be represented by the FDTD solver: \
         it is only conditionally stable and cannot carry Nyquist-limit content"
    )]
    DeltaUnsupported,

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("numerical instability at step {step}: |field| = {value:e} exceeds bound {bound:e}")]
    Unstable { step: usize, value: f64, bound: f64 },

    #[error("steady state not reached: {0}")]
    NotConverged(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for failures caused by the numerics rather than by the input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::SingularPole { .. }
                | Error::NonPositivePermittivity { .. }
                | Error::Unstable { .. }
                | Error::NotConverged(_)
        )
    }
}

impl From<toml::de::Error> for Error {
    fn from(e: toml::de::Error) -> Self {
        Error::Config(e.to_string())
    }
}
