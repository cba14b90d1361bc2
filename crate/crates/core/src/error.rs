use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported Bessel order {0}")]
    UnsupportedOrder(String),

    #[error("moment system does not close (residual {residual:.3e}); domain is likely not a point quadrature domain")]
    NotQuadratureDomain { residual: f64 },

    #[error("near-singular system: {0}")]
    EigenvalueProximity(String),

    #[error("positivity hypothesis violated: {0}")]
    PositivityViolated(String),

    #[error("iteration did not converge after {iterations} iterations (relative residual {residual:.3e})")]
    NonConvergence {
        iterations: usize,
        residual: f64,
        history: Vec<f64>,
    },

    #[error("empty support indicator")]
    EmptySupport,

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
