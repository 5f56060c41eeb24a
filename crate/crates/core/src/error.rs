use thiserror::Error;

/// Errors raised by the evaluators, the quadrature driver and the scan harness.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("pole of {func} at {at}")]
    Pole { func: &'static str, at: String },

    #[error("{func}: argument outside domain ({reason})")]
    Domain { func: &'static str, reason: String },

    #[error("{func}: result overflows binary64 (log-magnitude {log_magnitude:.3e})")]
    Overflow { func: &'static str, log_magnitude: f64 },

    #[error("{what}: budget exceeded ({detail})")]
    BudgetExceeded { what: &'static str, detail: String },

    #[error("insufficient data: need at least {needed} usable points, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("degenerate fit: all abscissae equal")]
    DegenerateFit,

    #[error("empty input")]
    EmptyInput,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
