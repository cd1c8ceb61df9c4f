use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown code `{0}` (expected one of hamming74, hamming84, rm13)")]
    UnknownCode(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid configuration: offending keys [{}]", keys.join(", "))]
    InvalidConfig {
        keys: Vec<String>,
        details: Vec<String>,
    },

    #[error("{source_name}:{line}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        message: String,
    },

    #[error("structural error: {0}")]
    Structural(String),

    #[error("calibration failed: {message}")]
    Calibration {
        message: String,
        residuals: Vec<f64>,
    },

    #[error("not converged: {0}")]
    NotConverged(String),

    #[error("netlist json: {0}")]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit status for the command-line front end.
    ///
    /// 1 is I/O, 2 validation or parse, 3 structural, 4 non-convergence.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io(_) => 1,
            Error::UnknownCode(_)
            | Error::InvalidInput(_)
            | Error::InvalidConfig { .. }
            | Error::Parse { .. }
            | Error::Json(_)
            | Error::Calibration { .. } => 2,
            Error::Structural(_) => 3,
            Error::NotConverged(_) => 4,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
