use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A caller broke an operation's precondition (out-of-range input, negative bias, ...).
    #[error("contract violation: {0}")]
    Contract(String),

    /// Parameters that cannot describe a working design.
    #[error("configuration error: {0}")]
    Config(String),

    #[error("solver did not converge after {iterations} iterations (residual {residual:.3e}): {context}")]
    NonConvergence {
        iterations: usize,
        residual: f64,
        context: String,
    },

    #[error("numerical error: {0}")]
    Numerical(String),

    /// Ratio metric evaluated where the reference current is too small to be meaningful.
    #[error("undefined ratio: reference current {current:.3e} A is below {floor:.1e} A")]
    UndefinedRatio { current: f64, floor: f64 },
}

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
