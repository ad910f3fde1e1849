use thiserror::Error;

/// Errors surfaced by the clustering library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("power mean domain error: {0}")]
    Domain(String),

    /// Raised by the centroid update when a cluster's majorizer column sum
    /// underflows; the fit loops catch this and reseed the centroid.
    #[error("cluster {cluster} received no majorizer mass")]
    EmptyCluster { cluster: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
