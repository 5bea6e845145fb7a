use std::io;
use std::path::PathBuf;

use rplab_core::et_model::EtError;
use rplab_core::spin::SpinError;

use crate::config::ConfigError;
use crate::table::TableError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID_CONFIG: i32 = 1;
pub const EXIT_VERIFY_FAILED: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),

    #[error(transparent)]
    Table(#[from] TableError),

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },

    #[error("electron-transfer model: {0}")]
    Et(#[from] EtError),

    #[error("spin dynamics: {0}")]
    Spin(#[from] SpinError),

    #[error("sweep point {index}: {source}")]
    SweepPoint { index: usize, source: Box<CliError> },
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_INVALID_CONFIG,
            CliError::SweepPoint { source, .. } => source.exit_code(),
            _ => EXIT_RUNTIME,
        }
    }
}
