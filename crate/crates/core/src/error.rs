use thiserror::Error;

pub type Result<T> = std::result::Result<T, HeodError>;

#[derive(Debug, Error)]
pub enum HeodError {
    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("degenerate steady state: population null space has dimension {nullity}")]
    DegenerateSteadyState { nullity: usize },

    #[error("non-finite value during integration at step {step}")]
    NumericOverflow { step: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid pathway: {0}")]
    InvalidPathway(String),

    #[error("pathway order {requested} exceeds the enumeration limit {limit}")]
    Limit { requested: usize, limit: usize },

    #[error("rotating-wave approximation: {0}")]
    RwaMismatch(String),

    #[error("affine shift is not a steady state of the generator (residual {residual:.3e} at t = {time})")]
    ShiftInvalid { residual: f64, time: f64 },

    #[error("sweep failed at s = {s}: {source}")]
    Sweep {
        s: usize,
        #[source]
        source: Box<HeodError>,
    },
}
