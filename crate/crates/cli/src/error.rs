use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("grid error: {0}")]
    GridSpec(String),
    #[error("point {re}{im:+}i is outside the domain of {function} (margin {margin:e})")]
    GridDomain { function: String, re: f64, im: f64, margin: f64 },
    #[error(transparent)]
    Core(#[from] extlab_core::ExtError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// 2 for anything the user can fix in the inputs, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::GridSpec(_) | CliError::GridDomain { .. } => 2,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
