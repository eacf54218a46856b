//! One (α, R, β) case: solve, evaluate functionals, certify.

use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use beta_os_core::{
    build_grid, builtin_profile_with, certify, energy_integrals, solve_spectrum_with, verify_identities,
    BoundCertificate, Complex64, Error, FlowParameters, IdentityReport, ProfileSource, SolverConfig, Spectrum,
    VelocityProfile, BUILTIN_NAMES,
};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// Resolves a builtin name, or failing that a CSV table path.
pub fn resolve_profile(name: &str, kappa: Option<f64>) -> Result<VelocityProfile> {
    if BUILTIN_NAMES.contains(&name) {
        return Ok(builtin_profile_with(name, kappa)?);
    }
    let path = Path::new(name);
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) || path.is_file() {
        return Ok(VelocityProfile::from_csv(path)?);
    }
    Err(Error::UnknownProfile {
        name: name.to_owned(),
        valid: BUILTIN_NAMES.to_vec(),
    }
    .into())
}

/// One kept mode, least stable first.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeRecord {
    /// 1 for the least stable converged mode.
    pub rank: usize,
    pub c: Complex64,
    pub converged: bool,
    pub drift: f64,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseResult {
    pub params: FlowParameters,
    pub eigenvalues: Vec<ModeRecord>,
    pub certificates: Vec<BoundCertificate>,
    pub identity: Vec<IdentityReport>,
    /// Converged modes found, kept or not.
    pub converged_total: usize,
    /// Converged modes, kept or not, that break a bound beyond tolerance.
    pub bound_violations: usize,
    pub violation_details: Vec<String>,
    /// Largest identity residual over all converged modes.
    pub max_identity_residual: f64,
    /// Converged modes whose discarded `Im Q` part exceeded its threshold.
    pub im_q_flags: usize,
    pub no_converged_modes: bool,
    /// Seconds spent on the case. Never written to sweep outputs.
    pub wall_time: f64,
}

/// Solves one case and certifies its converged modes, keeping the
/// `modes_kept` least stable.
pub fn run_single(
    profile: &VelocityProfile,
    params: &FlowParameters,
    solver: &SolverConfig,
    modes_kept: usize,
) -> Result<CaseResult> {
    let start = Instant::now();
    let spectrum = solve_spectrum_with(profile, params, solver)?;
    let mut result = analyse(profile, params, &spectrum, modes_kept)?;
    result.wall_time = start.elapsed().as_secs_f64();
    Ok(result)
}

/// Evaluates functionals, identities and certificates on a solved spectrum.
pub fn analyse(
    profile: &VelocityProfile,
    params: &FlowParameters,
    spectrum: &Spectrum,
    modes_kept: usize,
) -> Result<CaseResult> {
    let grid = build_grid(spectrum.n)?;
    let mut result = CaseResult {
        params: *params,
        eigenvalues: Vec::new(),
        certificates: Vec::new(),
        identity: Vec::new(),
        converged_total: 0,
        bound_violations: 0,
        violation_details: Vec::new(),
        max_identity_residual: 0.0,
        im_q_flags: 0,
        no_converged_modes: spectrum.no_converged_modes,
        wall_time: 0.0,
    };
    for (k, pair) in spectrum.converged().enumerate() {
        let ef = energy_integrals(&pair.phi, profile, params, &grid)?;
        let report = verify_identities(pair, &ef, params);
        let cert = certify(pair, &ef, profile, params);
        result.converged_total += 1;
        result.max_identity_residual = result.max_identity_residual.max(report.identity_residual);
        if ef.im_q_flagged() {
            result.im_q_flags += 1;
        }
        let broken = cert.violations(pair.c);
        if !broken.is_empty() {
            result.bound_violations += 1;
            for msg in broken {
                result.violation_details.push(format!("mode {}: {msg}", k + 1));
            }
        }
        if k < modes_kept {
            result.eigenvalues.push(ModeRecord {
                rank: k + 1,
                c: pair.c,
                converged: pair.converged,
                drift: pair.drift,
                residual: pair.residual,
            });
            result.certificates.push(cert);
            result.identity.push(report);
        }
    }
    Ok(result)
}

/// Human-readable table of the kept modes.
pub fn render_table(profile: &VelocityProfile, result: &CaseResult) -> String {
    let p = &result.params;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "profile {profile}  alpha {}  reynolds {}  beta {}",
        p.alpha, p.reynolds, p.beta
    );
    if let Some(cert) = result.certificates.first() {
        let _ = writeln!(
            out,
            "c_i ceiling {:.6e}   c_r band {} ({:.6}, {:.6})   stability threshold R* {:.6e}",
            cert.ci_ceiling, cert.cr_band.case, cert.cr_band.lower, cert.cr_band.upper, cert.stability_threshold_r
        );
    }
    let _ = writeln!(
        out,
        "{:>4}  {:>22}  {:>22}  {:>9}  {:>9}  {:>9}  {:>10}  {}",
        "rank", "c_r", "c_i", "drift", "residual", "identity", "min audit", "bounds"
    );
    for ((mode, cert), report) in result.eigenvalues.iter().zip(&result.certificates).zip(&result.identity) {
        let status = if cert.is_sound(mode.c) { "ok" } else { "VIOLATED" };
        let _ = writeln!(
            out,
            "{:>4}  {:>22.15e}  {:>22.15e}  {:>9.2e}  {:>9.2e}  {:>9.2e}  {:>10.3e}  {status}",
            mode.rank,
            mode.c.re,
            mode.c.im,
            mode.drift,
            mode.residual,
            report.identity_residual,
            cert.min_audit_margin()
        );
    }
    let _ = writeln!(
        out,
        "{} converged modes, {} with bound violations, max identity residual {:.3e}",
        result.converged_total, result.bound_violations, result.max_identity_residual
    );
    if result.no_converged_modes {
        let _ = writeln!(out, "warning: no mode survived the resolution filter");
    }
    out
}

/// A solved spectrum with everything needed to certify it again later.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SavedSpectrum {
    pub version: String,
    pub profile_name: String,
    pub profile: ProfileSource,
    pub params: FlowParameters,
    pub solver: SolverConfig,
    pub spectrum: Spectrum,
}

impl SavedSpectrum {
    pub fn new(profile: &VelocityProfile, params: FlowParameters, solver: SolverConfig, spectrum: Spectrum) -> Self {
        Self {
            version: crate::VERSION.to_owned(),
            profile_name: profile.name().to_owned(),
            profile: profile.source().clone(),
            params,
            solver,
            spectrum,
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string(self).map_err(|e| CliError::Saved {
            path: path.to_path_buf(),
            msg: e.to_string(),
        })?;
        std::fs::write(path, text).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|e| CliError::Saved {
            path: path.to_path_buf(),
            msg: e.to_string(),
        })
    }

    pub fn profile(&self) -> Result<VelocityProfile> {
        Ok(VelocityProfile::from_source(&self.profile)?)
    }
}
