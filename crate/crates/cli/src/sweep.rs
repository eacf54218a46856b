//! Parameter sweeps: parallel cases, ordered CSV output and a manifest.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::mpsc;

use beta_os_core::{FlowParameters, VelocityProfile};
use rayon::prelude::*;
use serde::Serialize;

use crate::case::{resolve_profile, run_single, CaseResult};
use crate::config::SweepConfig;
use crate::error::{CliError, Result};

pub const CSV_HEADER: &str =
    "alpha,reynolds,beta,mode_rank,c_r,c_i,converged,ci_ceiling,cr_lower,cr_upper,cr_case,identity_residual";
pub const CSV_FILE: &str = "sweep.csv";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const THREADS_ENV: &str = "BETA_OS_THREADS";

/// Contents of `manifest.json`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Manifest {
    pub config: SweepConfig,
    pub version: String,
    pub cases_total: usize,
    pub cases_failed: usize,
    pub bound_violations: usize,
    pub max_identity_residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSummary {
    pub manifest: Manifest,
    pub csv_path: PathBuf,
    pub manifest_path: PathBuf,
    pub rows_written: usize,
    /// Cases that produced no converged mode.
    pub empty_cases: usize,
    pub im_q_flags: usize,
    /// One line per failed case, in case order.
    pub failures: Vec<String>,
}

/// Worker count from `BETA_OS_THREADS`; unset or 0 lets the pool decide.
pub fn threads_from_env() -> Result<usize> {
    match std::env::var(THREADS_ENV) {
        Ok(v) if !v.trim().is_empty() => v.trim().parse().map_err(|_| CliError::Threads(v)),
        _ => Ok(0),
    }
}

/// Cases in output order: α outer, R middle, β inner.
pub fn case_grid(config: &SweepConfig) -> Vec<(f64, f64, f64)> {
    let (alphas, rs, betas) = (config.alphas(), config.reynolds_numbers(), config.betas());
    let mut out = Vec::with_capacity(config.cases_total());
    for &a in &alphas {
        for &r in &rs {
            for &b in &betas {
                out.push((a, r, b));
            }
        }
    }
    out
}

/// 17 significant digits.
fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// CSV rows for one case, each terminated by LF.
pub fn csv_rows(result: &CaseResult) -> String {
    let p = &result.params;
    let mut out = String::new();
    for ((mode, cert), report) in result.eigenvalues.iter().zip(&result.certificates).zip(&result.identity) {
        let fields = [
            num(p.alpha),
            num(p.reynolds),
            num(p.beta),
            mode.rank.to_string(),
            num(mode.c.re),
            num(mode.c.im),
            mode.converged.to_string(),
            num(cert.ci_ceiling),
            num(cert.cr_band.lower),
            num(cert.cr_band.upper),
            cert.cr_band.case.as_str().to_owned(),
            num(report.identity_residual),
        ];
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Runs every case of `config` on `threads` workers (0 = automatic) and
/// writes `sweep.csv` and `manifest.json` into the output directory.
///
/// Results are written in case order as soon as all earlier cases are done,
/// and flushed after each case.
pub fn run_sweep(config: &SweepConfig, threads: usize) -> Result<SweepSummary> {
    config.validate()?;
    let profile = resolve_profile(&config.profile, config.kappa)?;
    let dir = &config.output_dir;
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let csv_path = dir.join(CSV_FILE);
    let manifest_path = dir.join(MANIFEST_FILE);
    let mut csv = BufWriter::new(File::create(&csv_path).map_err(io_err(&csv_path))?);
    csv.write_all(CSV_HEADER.as_bytes()).map_err(io_err(&csv_path))?;
    csv.write_all(b"\n").map_err(io_err(&csv_path))?;
    csv.flush().map_err(io_err(&csv_path))?;

    let cases = case_grid(config);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Threads(e.to_string()))?;
    let solver = config.solver();

    let mut summary = SweepSummary {
        manifest: Manifest {
            config: config.clone(),
            version: crate::VERSION.to_owned(),
            cases_total: cases.len(),
            cases_failed: 0,
            bound_violations: 0,
            max_identity_residual: 0.0,
        },
        csv_path: csv_path.clone(),
        manifest_path: manifest_path.clone(),
        rows_written: 0,
        empty_cases: 0,
        im_q_flags: 0,
        failures: Vec::new(),
    };

    let (tx, rx) = mpsc::channel::<(usize, Result<CaseResult>)>();
    let write_result = std::thread::scope(|scope| {
        let cases = &cases;
        let profile: &VelocityProfile = &profile;
        scope.spawn(move || {
            pool.install(|| {
                cases.par_iter().enumerate().for_each_with(tx, |tx, (index, &(a, r, b))| {
                    let outcome = FlowParameters::new(a, r, b)
                        .map_err(CliError::from)
                        .and_then(|params| run_single(profile, &params, &solver, config.modes_kept));
                    // The receiver only disappears after a write error.
                    let _ = tx.send((index, outcome));
                });
            });
        });

        let mut pending = BTreeMap::new();
        let mut next = 0;
        for (index, outcome) in rx {
            pending.insert(index, outcome);
            while let Some(outcome) = pending.remove(&next) {
                let (a, r, b) = cases[next];
                record(&mut summary, &mut csv, &csv_path, outcome, (a, r, b))?;
                next += 1;
            }
        }
        Ok::<_, CliError>(())
    });
    write_result?;

    let text = serde_json::to_string_pretty(&summary.manifest).map_err(|e| CliError::Saved {
        path: manifest_path.clone(),
        msg: e.to_string(),
    })?;
    std::fs::write(&manifest_path, text + "\n").map_err(io_err(&manifest_path))?;
    Ok(summary)
}

fn record(
    summary: &mut SweepSummary,
    csv: &mut BufWriter<File>,
    csv_path: &Path,
    outcome: Result<CaseResult>,
    (a, r, b): (f64, f64, f64),
) -> Result<()> {
    match outcome {
        Ok(result) => {
            let m = &mut summary.manifest;
            m.bound_violations += result.bound_violations;
            m.max_identity_residual = m.max_identity_residual.max(result.max_identity_residual);
            summary.rows_written += result.eigenvalues.len();
            summary.im_q_flags += result.im_q_flags;
            if result.no_converged_modes {
                summary.empty_cases += 1;
            }
            csv.write_all(csv_rows(&result).as_bytes()).map_err(io_err(csv_path))?;
            csv.flush().map_err(io_err(csv_path))?;
        }
        Err(err) => {
            summary.manifest.cases_failed += 1;
            summary.failures.push(format!("alpha {a} reynolds {r} beta {b}: {err}"));
        }
    }
    Ok(())
}
