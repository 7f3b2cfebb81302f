use std::path::{Path, PathBuf};

use resdep_core::dispatch::DispatchError;
use resdep_core::dsl::DslError;
use resdep_core::ftsim::FtError;
use resdep_core::model::ModelError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    /// Message already carries `line:col` when known.
    #[error("{path}:{message}")]
    Input { path: PathBuf, message: String },
    #[error("{0}")]
    Model(#[from] ModelError),
    #[error("simulation failed: {0}")]
    Simulation(FtError),
    #[error("{0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Simulation(_) => 1,
            _ => 2,
        }
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }

    pub fn dsl(path: &Path, e: DslError) -> Self {
        let message = if e.position().is_some() { e.to_string() } else { format!(" {e}") };
        CliError::Input { path: path.to_path_buf(), message }
    }

    pub fn dispatch(path: &Path, e: DispatchError) -> Self {
        let message = match e {
            DispatchError::Parse { .. } => e.to_string(),
            other => format!(" {other}"),
        };
        CliError::Input { path: path.to_path_buf(), message }
    }

    pub fn script(path: &Path, e: FtError) -> Self {
        let message = match e {
            FtError::Parse { .. } => e.to_string(),
            other => format!(" {other}"),
        };
        CliError::Input { path: path.to_path_buf(), message }
    }
}

pub fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}
