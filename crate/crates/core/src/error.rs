use std::path::PathBuf;

/// Errors raised by the modelling, dynamics and experiment layers.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("degenerate drive: parametric frequency must be positive (got {0} GHz)")]
    DegenerateDrive(f64),

    #[error("no solution: {0}")]
    NoSolution(String),

    #[error("resonance mismatch: {0}")]
    ResonanceMismatch(String),

    #[error("model validity: {0}")]
    ModelValidity(String),

    #[error("no zero-coupling flux: {0}")]
    NoZero(String),

    #[error("step size too large: norm drift {drift:.3e} exceeds 1e-6, reduce dt (currently {dt:.3e} s)")]
    StepSize { drift: f64, dt: f64 },

    #[error("no oscillation: {0}")]
    NoOscillation(String),

    #[error("config error in `{field}`: {constraint}")]
    Config { field: String, constraint: String },

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, constraint: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            constraint: constraint.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors that stem from user configuration rather than numerics.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config { .. } | Error::InvalidInput(_) | Error::ResonanceMismatch(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
