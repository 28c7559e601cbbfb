use thiserror::Error;

/// Errors raised by the library.
///
/// The exhaustion variants are informative outcomes rather than failures:
/// a construction that runs out of search room on a uniformly bounded
/// series is reporting something true about that series.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("vector support reaches coordinate {index} but the space has dimension {dim}")]
    DimensionMismatch { index: usize, dim: usize },

    #[error("invalid space: {0}")]
    InvalidSpace(String),

    #[error("unknown catalog series `{0}`")]
    UnknownSeries(String),

    #[error("invalid stem: {0}")]
    InvalidStem(String),

    #[error("horizon {horizon} exceeds stem length {len}")]
    HorizonExceedsStem { horizon: usize, len: usize },

    #[error("partial-sum trace has a gap at l = {0}")]
    GapInTrace(usize),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("n = {n} is too large for exhaustive enumeration (limit {limit})")]
    NTooLarge { n: usize, limit: usize },

    #[error("strategy {strategy} does not apply to {space}")]
    StrategyNotApplicable { strategy: String, space: String },

    #[error("growth oracle exhausted at horizon {horizon} (reached norm {reached})")]
    OracleExhausted { horizon: usize, reached: f64 },

    #[error("scan horizon {horizon} exhausted: {what}")]
    ScanHorizonExhausted { horizon: usize, what: String },

    #[error("inconsistent growth witness: {0}")]
    InconsistentWitness(String),

    #[error("precondition violated: {0}")]
    PreconditionViolation(String),
}

impl Error {
    /// True for outcomes that mean "no witness exists within the search
    /// budget" as opposed to a malformed request.
    pub fn is_exhaustion(&self) -> bool {
        matches!(
            self,
            Error::OracleExhausted { .. } | Error::ScanHorizonExhausted { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
