//! Single solves, parameter sweeps and certificate reports on top of
//! `beta-os-core`.

pub mod case;
pub mod config;
pub mod error;
pub mod sweep;

pub use case::{analyse, render_table, resolve_profile, run_single, CaseResult, ModeRecord, SavedSpectrum};
pub use config::{ParamRange, PartialSweepConfig, SweepConfig};
pub use error::{CliError, Result};
pub use sweep::{run_sweep, threads_from_env, Manifest, SweepSummary, CSV_HEADER};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
