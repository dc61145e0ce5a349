use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the numerical core and the image/depth plumbing.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: String, actual: String },

    #[error("adjoint structure violated: relative deviation {deviation:.3e} exceeds tolerance {tol:.3e}")]
    StructureViolation { deviation: f64, tol: f64 },

    #[error("matrix is not positive definite: pivot {pivot:.3e} at index {index} below threshold {threshold:.3e}")]
    NotPositiveDefinite {
        index: usize,
        pivot: f64,
        threshold: f64,
    },

    #[error("objective became non-finite at iteration {iteration}")]
    NonFiniteObjective { iteration: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("image too small for SSIM: {rows}x{cols} (needs at least {min}x{min})")]
    TooSmall { rows: usize, cols: usize, min: usize },

    #[error("invalid image data: {0}")]
    InvalidImage(String),

    #[error("depth provider failed: {message}")]
    ProviderFailure { message: String },

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {source}", path.display())]
    Codec {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn dims(expected: (usize, usize), actual: (usize, usize)) -> Self {
        Error::DimensionMismatch {
            expected: format!("{}x{}", expected.0, expected.1),
            actual: format!("{}x{}", actual.0, actual.1),
        }
    }

    pub(crate) fn provider(message: impl Into<String>) -> Self {
        Error::ProviderFailure {
            message: message.into(),
        }
    }

    /// Wraps the error with the name of the pipeline stage that produced it.
    pub fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}
