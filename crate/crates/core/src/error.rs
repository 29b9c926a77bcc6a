use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid {n1}x{n2} is too small; both sizes must be at least 4")]
    GridTooSmall { n1: usize, n2: usize },
    #[error("point at site {site} is off the target manifold by {distance:e}")]
    OffManifold { site: usize, distance: f64 },
    #[error("spinor field is not tangent at site {site}; normal part {normal:e}")]
    TangencyViolation { site: usize, normal: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("non-finite value encountered in {0}")]
    NonFinite(String),
    #[error("step size underflow: {0:e}")]
    StepUnderflow(f64),
    #[error("radius list is empty")]
    EmptyRadii,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Short machine-readable tag for the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::GridTooSmall { .. } => "grid_too_small",
            Error::OffManifold { .. } => "off_manifold",
            Error::TangencyViolation { .. } => "tangency_violation",
            Error::DimensionMismatch(_) => "dimension_mismatch",
            Error::NonFinite(_) => "non_finite",
            Error::StepUnderflow(_) => "step_underflow",
            Error::EmptyRadii => "empty_radii",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::Parse(_) => "parse",
            Error::Io(_) => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
