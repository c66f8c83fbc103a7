use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A scalar field was evaluated at a singularity (division by zero,
    /// logarithm or root of a nonpositive number) or outside the chart.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("metric is singular or not positive definite at {0:?}")]
    SingularMetric(Vec<f64>),

    #[error("vector is not in the contact distribution (max |eta^j(X)| = {0:e})")]
    NotInContactDistribution(f64),

    #[error("hypothesis unmet: {0}")]
    HypothesisUnmet(String),

    #[error("degenerate spectrum: {0}")]
    DegenerateSpectrum(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Config(e.to_string())
    }
}
