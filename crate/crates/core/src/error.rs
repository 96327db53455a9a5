use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input outside the domain of a formula.
    #[error("domain error: {quantity} {reason}")]
    Domain {
        quantity: &'static str,
        reason: String,
    },

    /// A square-root argument in a closed form went non-positive.
    #[error("non-positive square-root argument in {factor}: {value:e}")]
    NegativeRoot { factor: &'static str, value: f64 },

    /// The leading term vanishes and the linearised error relation no longer holds.
    #[error("higher-order regime: |{term}| = {leading:e} is not above 10x the residual {residual:e}")]
    HigherOrderRegime {
        term: &'static str,
        leading: f64,
        residual: f64,
    },

    #[error("regime check failed: {0}")]
    InvalidRegime(String),

    /// Zero quantum Fisher information: no finite bound exists.
    #[error("quantum Fisher information is zero; the Cramer-Rao bound is infinite")]
    InfiniteBound,

    #[error("no sign change of delta on [{lo}, {hi}]")]
    NotFound { lo: f64, hi: f64 },

    #[error("numerical failure in {what}: achieved {achieved:e}")]
    Numerical { what: &'static str, achieved: f64 },

    #[error("integrator failure: {0}")]
    Integrator(String),

    #[error("cancelled")]
    Cancelled,
}

impl Error {
    pub fn domain(quantity: &'static str, reason: impl Into<String>) -> Error {
        Error::Domain {
            quantity,
            reason: reason.into(),
        }
    }
}
