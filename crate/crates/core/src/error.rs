use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReachError {
    #[error("invalid metric: {0}")]
    InvalidMetric(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("chart boundary: {reason} at {coords:?}")]
    ChartBoundary { coords: Vec<f64>, reason: String },

    #[error("geodesic leaves the chart domain at parameter t = {parameter}")]
    GeodesicExit { parameter: f64 },

    #[error("no geodesic found after {iterations} iterations (endpoint residual {residual:e})")]
    NoGeodesic { iterations: usize, residual: f64 },

    #[error("invalid rotation: {0}")]
    InvalidRotation(String),

    #[error("invalid local data: {0}")]
    InvalidLocalData(String),

    #[error("invalid bound envelope: {0}")]
    InvalidEnvelope(String),

    #[error("bound envelope does not cover the metric at {coords:?}")]
    EnvelopeNotCovering { coords: Vec<f64> },

    #[error("guaranteed velocity set is empty (alpha = {alpha})")]
    EmptyVelocitySet { alpha: f64 },

    #[error("tangent vector is based at a different point")]
    BaseMismatch,

    #[error("expression error in `{source_text}`: {message}")]
    Expression { source_text: String, message: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl ReachError {
    pub(crate) fn boundary(coords: &[f64], reason: impl Into<String>) -> Self {
        ReachError::ChartBoundary {
            coords: coords.to_vec(),
            reason: reason.into(),
        }
    }

    /// Whether this error ends a trajectory rather than aborting a run.
    pub fn is_termination(&self) -> bool {
        matches!(
            self,
            ReachError::ChartBoundary { .. }
                | ReachError::GeodesicExit { .. }
                | ReachError::EmptyVelocitySet { .. }
                | ReachError::EnvelopeNotCovering { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, ReachError>;
