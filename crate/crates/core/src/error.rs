use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("state space of {states} configurations exceeds the enumeration cap {cap}")]
    CapExceeded { states: f64, cap: u64 },

    #[error("spin system has no admissible configuration")]
    EmptySupport,

    #[error("no spin at site {site} yields an admissible configuration")]
    InvalidContext { site: usize },

    #[error("unsupported model: {0}")]
    UnsupportedModel(String),

    #[error("weak-dependence condition violated: {0}")]
    ConditionViolated(String),

    #[error("power iteration did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("numeric failure: {0}")]
    NumericFailure(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("coefficient tensor has a nonzero entry on the generalized diagonal at {index:?}")]
    DiagonalNonzero { index: Vec<usize> },

    #[error("pattern with {vertices} vertices exceeds the analysis cap of {cap}")]
    PatternTooLarge { vertices: usize, cap: usize },

    #[error("invalid graph: {0}")]
    Graph(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
