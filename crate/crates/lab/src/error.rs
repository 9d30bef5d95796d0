use std::io;

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    /// Bad flags, config or input files. Maps to exit code 2.
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] maxavg_core::Error),
    #[error("io: {0}")]
    Io(#[from] io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl LabError {
    pub fn input(msg: impl Into<String>) -> Self {
        LabError::Input(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Input(_) => 2,
            LabError::Core(e) => match e {
                maxavg_core::Error::Invalid(_)
                | maxavg_core::Error::Parse(_)
                | maxavg_core::Error::Domain
                | maxavg_core::Error::Unsupported(_) => 2,
                _ => 1,
            },
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, LabError>;
