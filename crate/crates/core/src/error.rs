use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("point lies outside the chart domain")]
    Domain,
    #[error("unsupported: {0}")]
    Unsupported(&'static str),
    #[error("degenerate: {0}")]
    Degenerate(&'static str),
    #[error("the xi'' block of the frequency vanishes")]
    SingularDirection,
    #[error("newton iteration stalled after {iterations} steps (residual {residual:e})")]
    Convergence { iterations: usize, residual: f64 },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("sampler exhausted after {0} attempts")]
    SamplerExhausted(usize),
    #[error("induction margin {0} is not positive")]
    NoContraction(String),
    #[error("{0} under-resolved sweep records")]
    UnderResolved(usize),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }
}
