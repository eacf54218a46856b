use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown profile `{name}` (valid: {})", valid.join(", "))]
    UnknownProfile { name: String, valid: Vec<&'static str> },

    #[error("z = {z} lies outside the channel [-1, 1]")]
    Domain { z: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("shape mismatch: expected length {expected}, got {got}")]
    Shape { expected: usize, got: usize },

    #[error("eigendecomposition failed ({reason}); ||A||_F = {norm_a:.3e}, ||B||_F = {norm_b:.3e}, cond_inf(B) ~ {cond_b:.3e}")]
    Numerical {
        reason: String,
        norm_a: f64,
        norm_b: f64,
        cond_b: f64,
    },

    #[error("profile table {path}: {msg}")]
    Table { path: PathBuf, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
