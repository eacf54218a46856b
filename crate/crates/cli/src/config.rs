//! Sweep configuration: ranges, file loading and flag overrides.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use beta_os_core::eigensolver::{DEFAULT_DEGREE, DEFAULT_FILTER_TOL, MIN_SOLVE_DEGREE};
use beta_os_core::spectral::MAX_DEGREE;
use beta_os_core::SolverConfig;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const DEFAULT_MODES_KEPT: usize = 5;

/// `count` values from `start` to `stop` inclusive.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RangeRepr")]
pub struct ParamRange {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

/// Ranges may be written as tables or as `start:stop:count` strings.
#[derive(Deserialize)]
#[serde(untagged)]
enum RangeRepr {
    Text(String),
    Table { start: f64, stop: f64, count: usize },
}

impl TryFrom<RangeRepr> for ParamRange {
    type Error = String;

    fn try_from(repr: RangeRepr) -> std::result::Result<Self, String> {
        match repr {
            RangeRepr::Text(s) => s.parse().map_err(|e: CliError| e.to_string()),
            RangeRepr::Table { start, stop, count } => Ok(Self { start, stop, count }),
        }
    }
}

impl FromStr for ParamRange {
    type Err = CliError;

    /// Accepts `start:stop:count` or a single value.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || CliError::Range(format!("expected `start:stop:count` or a number, got `{s}`"));
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        match parts.as_slice() {
            [v] => {
                let v: f64 = v.parse().map_err(|_| bad())?;
                Ok(Self::single(v))
            }
            [a, b, c] => Ok(Self {
                start: a.parse().map_err(|_| bad())?,
                stop: b.parse().map_err(|_| bad())?,
                count: c.parse().map_err(|_| bad())?,
            }),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for ParamRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.count)
    }
}

impl ParamRange {
    pub fn single(v: f64) -> Self {
        Self {
            start: v,
            stop: v,
            count: 1,
        }
    }

    fn validate(&self, name: &str) -> Result<()> {
        if !self.start.is_finite() || !self.stop.is_finite() {
            return Err(CliError::Range(format!("{name} range must be finite, got {self}")));
        }
        if self.count == 0 {
            return Err(CliError::Range(format!("{name} range count must be at least 1")));
        }
        if self.start > self.stop {
            return Err(CliError::Range(format!("{name} range start exceeds stop: {self}")));
        }
        if self.count == 1 && self.start != self.stop {
            return Err(CliError::Range(format!("{name} range with count 1 needs start == stop: {self}")));
        }
        Ok(())
    }

    /// Evenly spaced values; endpoints are reproduced exactly.
    pub fn linear(&self) -> Vec<f64> {
        self.spaced(|t| self.start + t * (self.stop - self.start))
    }

    /// Geometrically spaced values; endpoints are reproduced exactly.
    pub fn logarithmic(&self) -> Vec<f64> {
        let (a, b) = (self.start.ln(), self.stop.ln());
        self.spaced(|t| (a + t * (b - a)).exp())
    }

    fn spaced(&self, at: impl Fn(f64) -> f64) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let last = self.count - 1;
        (0..self.count)
            .map(|k| match k {
                0 => self.start,
                k if k == last => self.stop,
                k => at(k as f64 / last as f64),
            })
            .collect()
    }
}

/// A fully resolved sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    /// Builtin profile name or path to a `z,U` CSV table.
    pub profile: String,
    pub kappa: Option<f64>,
    pub alpha_range: ParamRange,
    /// Spaced logarithmically.
    pub reynolds_range: ParamRange,
    pub beta_range: ParamRange,
    pub n: usize,
    pub check_n: Option<usize>,
    pub filter_tol: f64,
    /// Converged modes written per case, least stable first.
    pub modes_kept: usize,
    pub output_dir: PathBuf,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        self.alpha_range.validate("alpha")?;
        self.reynolds_range.validate("reynolds")?;
        self.beta_range.validate("beta")?;
        if self.alpha_range.start <= 0.0 {
            return Err(CliError::Range("alpha must be positive".into()));
        }
        if self.reynolds_range.start <= 0.0 {
            return Err(CliError::Range("reynolds must be positive".into()));
        }
        if !(MIN_SOLVE_DEGREE..=MAX_DEGREE).contains(&self.n) {
            return Err(CliError::Range(format!(
                "n must lie in [{MIN_SOLVE_DEGREE}, {MAX_DEGREE}], got {}",
                self.n
            )));
        }
        if self.modes_kept == 0 {
            return Err(CliError::Range("modes_kept must be at least 1".into()));
        }
        self.solver().validate()?;
        Ok(())
    }

    pub fn solver(&self) -> SolverConfig {
        SolverConfig {
            n: self.n,
            check_n: self.check_n,
            filter_tol: self.filter_tol,
        }
    }

    pub fn alphas(&self) -> Vec<f64> {
        self.alpha_range.linear()
    }

    pub fn reynolds_numbers(&self) -> Vec<f64> {
        self.reynolds_range.logarithmic()
    }

    pub fn betas(&self) -> Vec<f64> {
        self.beta_range.linear()
    }

    pub fn cases_total(&self) -> usize {
        self.alpha_range.count * self.reynolds_range.count * self.beta_range.count
    }
}

/// Sweep settings where every field may be missing; files and flags are
/// merged field by field before resolving.
#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PartialSweepConfig {
    pub profile: Option<String>,
    pub kappa: Option<f64>,
    pub alpha_range: Option<ParamRange>,
    pub reynolds_range: Option<ParamRange>,
    pub beta_range: Option<ParamRange>,
    pub n: Option<usize>,
    pub check_n: Option<usize>,
    pub filter_tol: Option<f64>,
    pub modes_kept: Option<usize>,
    pub output_dir: Option<PathBuf>,
}

impl PartialSweepConfig {
    /// Reads a TOML or JSON file, chosen by extension (TOML otherwise).
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let parse_err = |msg: String| CliError::ConfigFile {
            path: path.to_path_buf(),
            msg,
        };
        if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
            serde_json::from_str(&text).map_err(|e| parse_err(e.to_string()))
        } else {
            toml::from_str(&text).map_err(|e| parse_err(e.to_string()))
        }
    }

    /// Fields set in `other` replace those in `self`.
    pub fn overridden_by(self, other: Self) -> Self {
        Self {
            profile: other.profile.or(self.profile),
            kappa: other.kappa.or(self.kappa),
            alpha_range: other.alpha_range.or(self.alpha_range),
            reynolds_range: other.reynolds_range.or(self.reynolds_range),
            beta_range: other.beta_range.or(self.beta_range),
            n: other.n.or(self.n),
            check_n: other.check_n.or(self.check_n),
            filter_tol: other.filter_tol.or(self.filter_tol),
            modes_kept: other.modes_kept.or(self.modes_kept),
            output_dir: other.output_dir.or(self.output_dir),
        }
    }

    pub fn resolve(self) -> Result<SweepConfig> {
        let missing = |field: &str| CliError::Range(format!("sweep needs `{field}` from the config file or flags"));
        let config = SweepConfig {
            profile: self.profile.ok_or_else(|| missing("profile"))?,
            kappa: self.kappa,
            alpha_range: self.alpha_range.ok_or_else(|| missing("alpha_range"))?,
            reynolds_range: self.reynolds_range.ok_or_else(|| missing("reynolds_range"))?,
            beta_range: self.beta_range.unwrap_or(ParamRange::single(0.0)),
            n: self.n.unwrap_or(DEFAULT_DEGREE),
            check_n: self.check_n,
            filter_tol: self.filter_tol.unwrap_or(DEFAULT_FILTER_TOL),
            modes_kept: self.modes_kept.unwrap_or(DEFAULT_MODES_KEPT),
            output_dir: self.output_dir.ok_or_else(|| missing("output_dir"))?,
        };
        config.validate()?;
        Ok(config)
    }
}
