use thiserror::Error;

/// Errors produced by the statistics, simulators and I/O layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty input")]
    EmptyInput,

    #[error("length mismatch: xs has {xs} entries, ys has {ys}")]
    LengthMismatch { xs: usize, ys: usize },

    #[error("non-finite value at row {index}")]
    NonFinite { index: usize },

    #[error("k out of range: k={k}, valid range is {min}..={max}")]
    KOutOfRange { k: usize, min: usize, max: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("Hill requires positive tail data (Z_(k+1) = {value})")]
    NonPositiveTail { value: f64 },

    #[error("quadrature did not converge: error estimate {error_estimate:e} > tol {tol:e} after {cells} cells")]
    QuadratureNotConverged {
        error_estimate: f64,
        tol: f64,
        cells: usize,
    },

    #[error("J oracle requires a density")]
    MissingDensity,

    #[error("the product characterization requires two Pickandsish probe levels, got {0}")]
    NotEnoughProbes(usize),

    #[error("window wider than grid: {window} admissible points, need at least {need}")]
    WindowTooWide { window: usize, need: usize },

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("{0}")]
    Ingest(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            context: context.into(),
            source,
        }
    }
}
