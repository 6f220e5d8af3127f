use thiserror::Error;
use vortex_core::VortexError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] VortexError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    /// Partial artifacts are on disk; the manifest records `last_good_eps`.
    #[error("sweep stopped after eps = {last_good_eps}: {source}")]
    SweepFailed { last_good_eps: f64, source: VortexError },
}
