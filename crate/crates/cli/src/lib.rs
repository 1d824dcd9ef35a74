//! Batch pipeline behind the `cultnov` binary: build culture-keyed splits,
//! score variations, and relate scores to cultural distances.

pub mod analyze;
pub mod build;
pub mod config;
pub mod io;
pub mod report;
pub mod score;

use std::fmt::Display;
use std::path::Path;

use thiserror::Error;

pub use analyze::{cmd_analyze, cmd_distances};
pub use build::cmd_build;
pub use config::RunConfig;
pub use report::cmd_report;
pub use score::cmd_score;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {message}")]
    Input { path: String, message: String },
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn input(path: &Path, err: impl Display) -> Self {
        Self::Input { path: path.display().to_string(), message: err.to_string() }
    }

    pub fn internal(err: impl Display) -> Self {
        Self::Internal(err.to_string())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => 1,
            Self::Input { .. } => 2,
            Self::Internal(_) => 3,
        }
    }
}

/// Run `f` on a pool of `workers` threads (0 = library default).
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build().map_err(CliError::internal)?;
    Ok(pool.install(f))
}
