use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("moment order mismatch: {0}")]
    OrderMismatch(String),

    #[error("Pochhammer symbol ({c})_{index} in the denominator vanishes before the series terminates")]
    ZeroDenominatorPochhammer { c: i64, index: u32 },

    #[error("hypergeometric series with a = {a}, b = {b} does not terminate")]
    NonTerminating { a: i64, b: i64 },

    #[error("Eulerian order {order} exceeds table maximum {max}")]
    OrderExceedsTable { order: usize, max: usize },

    #[error("probability generating function has a pole at s = {0}")]
    PoleAtS(String),

    #[error("root tolerance exceeded: {0}")]
    RootToleranceExceeded(String),

    #[error("ill-conditioned coefficient system (condition estimate {0:e})")]
    IllConditionedSystem(f64),

    #[error("coefficient validation failed: residual {residual:e} exceeds {tolerance:e}")]
    ValidationFailed { residual: f64, tolerance: f64 },

    #[error("tail of the v-sum did not converge within {0} terms")]
    NonConvergentTail(usize),

    #[error("{engine} does not support {what}")]
    Unsupported { engine: String, what: String },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
