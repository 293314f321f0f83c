use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SolitonError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("r = {r} lies outside the domain of warp model `{label}`")]
    OutsideDomain { r: f64, label: String },

    #[error("{quantity} is singular at r = {r}")]
    Singular { quantity: &'static str, r: f64 },

    #[error("incompatible combination: {0}")]
    Incompatible(String),

    #[error("adaptive step underflow at parameter {at} (step {step:e})")]
    StepFailure { at: f64, step: f64 },

    #[error("explicit step dtau = {dtau:e} exceeds the stability bound {bound:e}")]
    Stability { dtau: f64, bound: f64 },

    #[error(
        "Newton iteration did not converge after {iterations} iterations (residual {residual:e})"
    )]
    NewtonDivergence { iterations: usize, residual: f64 },

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("turning point not found: {0}")]
    TurningPointMissing(String),

    #[error("nothing to export")]
    NothingToExport,

    #[error("malformed input: {0}")]
    Parse(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl SolitonError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        SolitonError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, SolitonError>;
