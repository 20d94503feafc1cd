use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, HomingError>;

#[derive(Debug, Error)]
pub enum HomingError {
    #[error("points coincide (distance {distance:e} m is below the coincidence threshold)")]
    CoincidentPoints { distance: f64 },

    #[error("zero vector has no direction")]
    ZeroVector,

    #[error("vector is not unit length (norm {norm})")]
    NotUnit { norm: f64 },

    #[error("query point coincides with focus {index}")]
    AtFocus { index: usize },

    #[error("normalized bearing sum is undefined at this point (geometric median)")]
    UndefinedBearingSum,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid landmark set: {0}")]
    InvalidLandmarks(String),

    #[error("no eligible landmark pair: all desired bearings coincide")]
    NoEligiblePair,

    #[error("infeasible home: {0}")]
    InfeasibleHome(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("root finding did not converge (residual {residual:e})")]
    NoConvergence { residual: f64 },

    #[error("Hessian is singular along the isonormal curve at r = {r}")]
    SingularHessian { r: f64 },

    #[error("could not seed the isonormal curve: {0}")]
    SeedFailure(String),

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("rollout {index} failed: {source}")]
    Rollout {
        index: usize,
        #[source]
        source: Box<HomingError>,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl HomingError {
    /// True for errors caused by bad inputs rather than a failed computation.
    pub fn is_validation(&self) -> bool {
        match self {
            HomingError::Rollout { source, .. } => source.is_validation(),
            HomingError::Io { source, .. } => source.kind() == std::io::ErrorKind::NotFound,
            HomingError::NoConvergence { .. }
            | HomingError::SingularHessian { .. }
            | HomingError::SeedFailure(_)
            | HomingError::UndefinedBearingSum
            | HomingError::AtFocus { .. } => false,
            _ => true,
        }
    }
}
