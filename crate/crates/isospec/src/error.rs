//! Crate-wide error type.

/// Errors produced by the library.
///
/// Exit-code mapping used by the `isospec` binary: [`Error::Io`] is an I/O
/// failure (exit 3); everything else is a usage or configuration error
/// (exit 2). Verification failures are not errors; they are reported through
/// check results.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A caller-supplied argument violates a precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A requested band limit exceeds what a grid or table can resolve.
    #[error("band limit {requested} exceeds the exact capacity {available}")]
    BandLimit { requested: u32, available: u32 },

    /// A covariance produced a spectrum entry more negative than round-off.
    #[error("not a valid covariance: f_{degree} = {value:e} < -1e-8")]
    NotPositiveDefinite { degree: u32, value: f64 },

    /// An adaptive quadrature failed to reach its tolerance.
    #[error("quadrature did not converge: {0}")]
    NonConvergent(String),

    /// Division by a vanishing power-spectrum entry (bicoherence).
    #[error("power spectrum vanishes at degree {0}; bicoherence undefined there")]
    ZeroSpectrum(u32),

    /// Malformed text data (CSV rows, manifests).
    #[error("parse error: {0}")]
    Parse(String),

    /// JSON (de)serialization failure.
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    /// Underlying I/O failure.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
