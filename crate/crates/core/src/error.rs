use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid kernel parameters: {0}")]
    InvalidKernel(String),

    #[error("stability indicator is singular at r = 0")]
    SingularRadius,

    #[error("beta0 calibration failed: {0}")]
    Calibration(String),

    #[error("time step must be positive, got {0}")]
    NonPositiveTimeStep(f64),

    #[error("pressure solve diverged at iteration {iteration}: non-finite residual")]
    SolverDiverged { iteration: usize },

    #[error("non-finite state after step {step} at t = {time}")]
    NonFiniteState { step: u64, time: f64 },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("unknown scene `{0}`")]
    UnknownScene(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
