use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A point was given outside the Rényi map's domain `[0, 1)`.
    #[error("point {0} is outside [0, 1)")]
    OutOfDomain(String),

    /// A digit below 2 was supplied where a BCF digit was expected.
    #[error("invalid digit {0}: BCF digits are integers >= 2")]
    InvalidDigit(i64),

    /// A digit word must contain at least one digit.
    #[error("digit word is empty")]
    EmptyWord,

    /// A digit exceeded the 128-bit digit representation.
    #[error("digit at position {position} does not fit in 128 bits")]
    DigitOverflow { position: usize },

    /// A computation would exceed its configured work budget.
    #[error("{what}: needs {needed} units of work, limit is {limit}; try {suggestion}")]
    Budget { what: &'static str, needed: f64, limit: f64, suggestion: String },

    /// Malformed or inconsistent input parameters.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The arithmetic function fails the unbounded-flat-part growth criterion
    /// within the configured search range.
    #[error("no n <= {n_max} satisfies psi(n)/log(n) >= {k} (psi = {psi})")]
    GrowthCriterionNotMet { psi: String, k: usize, n_max: u64 },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// True for resource-limit failures (the CLI maps these to exit code 3).
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::Budget { .. })
    }
}
