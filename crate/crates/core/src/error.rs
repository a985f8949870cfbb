use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("unknown case id `{0}` (expected one of I..VII)")]
    UnknownCase(String),

    /// The 3x3 steady-state system has a vanishing determinant. Only
    /// possible when some mode carries no damping at all.
    #[error("singular steady-state system at omega_l = {omega_l}")]
    Singular { omega_l: f64 },

    #[error("gate evaluation requires g_o = -i g_e (got g_e = {g_e}, g_o = {g_o})")]
    GateCoupling { g_e: String, g_o: String },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("pulse truncated: {what} tail mass {mass:e} exceeds {limit:e}")]
    Truncation {
        what: &'static str,
        mass: f64,
        limit: f64,
    },

    #[error("invalid pulse: {0}")]
    InvalidPulse(String),

    #[error("time step {dt} too coarse: dt * max_rate = {product} > {limit}")]
    StepSize { dt: f64, product: f64, limit: f64 },

    #[error("state has zero norm")]
    ZeroNorm,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV error on {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn csv(path: impl Into<PathBuf>, source: csv::Error) -> Self {
        Error::Csv {
            path: path.into(),
            source,
        }
    }
}
