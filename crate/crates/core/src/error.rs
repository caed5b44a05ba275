use thiserror::Error;

/// Errors surfaced by the simulator core.
#[derive(Debug, Error)]
pub enum Error {
    /// A configuration field is out of range or inconsistent.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// The symmetric eigensolver failed to converge.
    #[error("eigensolver did not converge for class {class} at v = {v}")]
    Eigensolver { class: String, v: f64 },

    /// Requested basis level does not exist.
    #[error("level index {index} out of range (basis holds {count} levels)")]
    LevelOutOfRange { index: usize, count: usize },

    /// The retained basis captured too little of the state's norm.
    #[error("basis truncation failure: captured norm {captured:.12} < 1 - {tolerance:e}")]
    Truncation { captured: f64, tolerance: f64 },

    /// No interior local minimum of O(t) inside the search window.
    #[error("no local minimum of the orientation factor within t <= {window}")]
    NoMinimum { window: f64 },

    /// The classical integrator exceeded its energy-drift tolerance.
    #[error("integrator energy drift {drift:e} exceeds tolerance {tolerance:e} (sample {sample})")]
    IntegratorDrift {
        drift: f64,
        tolerance: f64,
        sample: usize,
    },

    /// File output failed.
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
