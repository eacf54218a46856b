use std::path::PathBuf;

pub type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] beta_os_core::Error),
    #[error("bad range: {0}")]
    Range(String),
    #[error("cannot parse config {path}: {msg}")]
    ConfigFile { path: PathBuf, msg: String },
    #[error("cannot read saved spectrum {path}: {msg}")]
    Saved { path: PathBuf, msg: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid BETA_OS_THREADS `{0}`: expected a non-negative integer")]
    Threads(String),
}
