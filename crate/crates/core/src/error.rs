use thiserror::Error;

/// Errors raised by the geometry, closed-form, lattice, kernel and oracle layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid interval ({a}, {b}): left endpoint must be strictly below right endpoint")]
    InvalidInterval { a: f64, b: f64 },

    #[error("intervals touch at {point}: closures must be disjoint")]
    TouchingIntervals { point: f64 },

    #[error("intervals ({a1}, {b1}) and ({a2}, {b2}) overlap")]
    OverlappingIntervals { a1: f64, b1: f64, a2: f64, b2: f64 },

    #[error("Möbius map has a pole at or inside the region (pole at {pole})")]
    PoleAtEndpoint { pole: f64 },

    #[error("domain error in {op}: {msg}")]
    DomainError { op: &'static str, msg: String },

    #[error("eigenvalue {value} of restricted covariance lies outside [0, 1] beyond tolerance")]
    SpectrumOutOfRange { value: f64 },

    #[error("site regions overlap at site {site}")]
    RegionsOverlap { site: usize },

    #[error("site {site} out of range for chain of {len} sites")]
    SiteOutOfRange { site: usize, len: usize },

    #[error("quadrature failed to reach tolerance after {subdivisions} subdivisions (error estimate {abs_err:e})")]
    QuadratureFailure { subdivisions: usize, abs_err: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("support of first state not contained in support of second (leaked weight {leak:e})")]
    SupportViolation { leak: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid step path: {0}")]
    InvalidPath(String),
}

impl Error {
    pub(crate) fn domain(op: &'static str, msg: impl Into<String>) -> Self {
        Error::DomainError { op, msg: msg.into() }
    }

    /// True for failures of a numerical routine rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::QuadratureFailure { .. } | Error::SpectrumOutOfRange { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
