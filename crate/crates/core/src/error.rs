use thiserror::Error;

/// Errors raised by the geometric and certification routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid body: {0}")]
    InvalidBody(String),

    #[error("invalid face specification: {0}")]
    InvalidFace(String),

    #[error("face is not proper: it covers the whole body")]
    ImproperFace,

    #[error("not a face: {0}")]
    NotAFace(String),

    #[error("invalid gap function: {0}")]
    InvalidGap(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("direction is zero")]
    ZeroDirection,

    #[error("direction leaves the affine hull (off-hull component {0:e})")]
    DirectionOutsideHull(f64),

    #[error("zero-dimensional body has no relative boundary")]
    ZeroDimensional,

    #[error("interior margin {margin:e} is too small for the requested construction; recenter the interior point")]
    MarginTooSmall { margin: f64 },

    #[error("numeric failure in {what} (residual {residual:e})")]
    Numeric { what: &'static str, residual: f64 },

    #[error("matrix is not idempotent (max |P^2 - P| = {0:e})")]
    NotIdempotent(f64),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by malformed or inadmissible input rather than
    /// by a failed computation.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidBody(_)
                | Error::InvalidFace(_)
                | Error::ImproperFace
                | Error::NotAFace(_)
                | Error::InvalidGap(_)
                | Error::Precondition(_)
                | Error::ZeroDirection
                | Error::DirectionOutsideHull(_)
                | Error::ZeroDimensional
                | Error::NotIdempotent(_)
                | Error::Json(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
