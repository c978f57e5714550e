use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("singular system (reciprocal condition estimate {rcond:e})")]
    SingularSystem { rcond: f64 },

    #[error("parse error at {path}: {message}")]
    Parse { path: String, message: String },

    #[error("trajectory left the trust ball at t = {t} (|x| = {norm:e}, escape radius {radius:e})")]
    Blowup { t: f64, norm: f64, radius: f64 },

    #[error("integrator step limit of {max_steps} reached at t = {t}")]
    StepLimit { t: f64, max_steps: usize },

    #[error("root within {distance:e} of the region boundary")]
    BoundaryAmbiguity { distance: f64 },

    #[error("fixed point is not isolated: {0}")]
    NonIsolated(String),

    #[error("series vanishes up to degree {cap}: non-isolated or truncation cap exceeded")]
    NonIsolatedOrCapExceeded { cap: usize },

    #[error("disk not found: {0}")]
    DiskNotFound(String),

    #[error("inconsistent disk: first-coordinate return error {residual:e} exceeds {tol:e}")]
    InconsistentDisk { residual: f64, tol: f64 },

    #[error("precondition failed: {0}")]
    PreconditionFailed(String),

    #[error("undetermined: {0}")]
    Undetermined(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// True for errors caused by malformed user input rather than by the analysis.
    pub fn is_input_error(&self) -> bool {
        matches!(self, Error::InvalidInput(_) | Error::Parse { .. })
    }
}
