use std::path::PathBuf;
use std::process::ExitCode;

use beta_os_cli::{
    analyse, render_table, resolve_profile, run_sweep, threads_from_env, ParamRange, PartialSweepConfig, Result,
    SavedSpectrum,
};
use beta_os_core::eigensolver::{DEFAULT_DEGREE, DEFAULT_FILTER_TOL};
use beta_os_core::{solve_spectrum_with, FlowParameters, SolverConfig, VelocityProfile, BUILTIN_NAMES};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "beta-os", version, about = "Shear-flow stability on the beta-plane with certified bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one (alpha, R, beta) case and print the least stable modes.
    Solve(SolveArgs),
    /// Run a parameter sweep, writing sweep.csv and manifest.json.
    Sweep(SweepArgs),
    /// Inspect the builtin profiles.
    Profiles {
        #[command(subcommand)]
        action: ProfilesAction,
    },
    /// Re-run the certificates on a spectrum saved by `solve --save`.
    Certify(CertifyArgs),
}

#[derive(Subcommand)]
enum ProfilesAction {
    /// List builtin profiles with their extremal values.
    List,
}

#[derive(Args)]
struct SolveArgs {
    /// Builtin profile name or `z,U` CSV table.
    #[arg(long)]
    profile: String,
    /// Steepness for tanh_layer and bickley_jet.
    #[arg(long, allow_negative_numbers = true)]
    kappa: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    alpha: f64,
    #[arg(long, allow_negative_numbers = true)]
    reynolds: f64,
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
    beta: f64,
    /// Polynomial degree of the collocation grid.
    #[arg(long, default_value_t = DEFAULT_DEGREE)]
    n: usize,
    /// Check resolution of the spurious-mode filter (default n + n/2).
    #[arg(long)]
    check_n: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_FILTER_TOL)]
    filter_tol: f64,
    /// Number of converged modes to print.
    #[arg(long, default_value_t = 5)]
    modes: usize,
    /// Write the full spectrum with eigenfunctions as JSON.
    #[arg(long)]
    save: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// TOML or JSON file with sweep settings; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    profile: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    kappa: Option<f64>,
    /// `start:stop:count`, linear.
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<ParamRange>,
    /// `start:stop:count`, logarithmic.
    #[arg(long, allow_hyphen_values = true)]
    reynolds: Option<ParamRange>,
    /// `start:stop:count`, linear.
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<ParamRange>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    check_n: Option<usize>,
    #[arg(long)]
    filter_tol: Option<f64>,
    #[arg(long)]
    modes_kept: Option<usize>,
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

#[derive(Args)]
struct CertifyArgs {
    /// Spectrum file written by `solve --save`.
    spectrum: PathBuf,
    #[arg(long, default_value_t = 5)]
    modes: usize,
}

/// Exit code for a run that completed but found a bound violation.
const VIOLATION: u8 = 2;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() { ExitCode::FAILURE } else { ExitCode::SUCCESS };
        }
    };
    let outcome = match cli.command {
        Command::Solve(args) => solve(args),
        Command::Sweep(args) => sweep(args),
        Command::Profiles {
            action: ProfilesAction::List,
        } => list_profiles(),
        Command::Certify(args) => certify(args),
    };
    match outcome {
        Ok(0) => ExitCode::SUCCESS,
        Ok(violations) => {
            eprintln!("{violations} bound violation(s) found");
            ExitCode::from(VIOLATION)
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}

/// Prints a case and returns its number of violating modes.
fn report(profile: &VelocityProfile, result: &beta_os_cli::CaseResult) -> usize {
    print!("{}", render_table(profile, result));
    for line in &result.violation_details {
        eprintln!("violation: {line}");
    }
    if result.im_q_flags > 0 {
        eprintln!("warning: {} mode(s) discarded a non-negligible imaginary part of Im Q", result.im_q_flags);
    }
    result.bound_violations
}

fn solve(args: SolveArgs) -> Result<usize> {
    let profile = resolve_profile(&args.profile, args.kappa)?;
    let params = FlowParameters::new(args.alpha, args.reynolds, args.beta)?;
    let solver = SolverConfig {
        n: args.n,
        check_n: args.check_n,
        filter_tol: args.filter_tol,
    };
    let spectrum = solve_spectrum_with(&profile, &params, &solver)?;
    let result = analyse(&profile, &params, &spectrum, args.modes)?;
    if let Some(path) = &args.save {
        SavedSpectrum::new(&profile, params, solver, spectrum).save(path)?;
    }
    Ok(report(&profile, &result))
}

fn sweep(args: SweepArgs) -> Result<usize> {
    let file = match &args.config {
        Some(path) => PartialSweepConfig::load(path)?,
        None => PartialSweepConfig::default(),
    };
    let flags = PartialSweepConfig {
        profile: args.profile,
        kappa: args.kappa,
        alpha_range: args.alpha,
        reynolds_range: args.reynolds,
        beta_range: args.beta,
        n: args.n,
        check_n: args.check_n,
        filter_tol: args.filter_tol,
        modes_kept: args.modes_kept,
        output_dir: args.output_dir,
    };
    let config = file.overridden_by(flags).resolve()?;
    let summary = run_sweep(&config, threads_from_env()?)?;
    for line in &summary.failures {
        eprintln!("case failed: {line}");
    }
    if summary.empty_cases > 0 {
        eprintln!("warning: {} case(s) had no converged modes", summary.empty_cases);
    }
    let m = &summary.manifest;
    println!(
        "{} cases ({} failed), {} rows -> {}",
        m.cases_total,
        m.cases_failed,
        summary.rows_written,
        summary.csv_path.display()
    );
    println!(
        "bound violations {}, max identity residual {:.3e}",
        m.bound_violations, m.max_identity_residual
    );
    Ok(m.bound_violations)
}

fn list_profiles() -> Result<usize> {
    println!(
        "{:<12} {:>10} {:>10} {:>10} {:>10} {:>10}",
        "name", "u_min", "u_max", "d2u_min", "d2u_max", "q"
    );
    for name in BUILTIN_NAMES {
        let p = resolve_profile(name, None)?;
        let e = p.extrema();
        println!(
            "{:<12} {:>10.6} {:>10.6} {:>10.6} {:>10.6} {:>10.6}",
            name, e.u_min, e.u_max, e.d2u_min, e.d2u_max, e.q
        );
    }
    println!("tanh_layer and bickley_jet take --kappa (default 1); any `z,U` CSV path is also accepted");
    Ok(0)
}

fn certify(args: CertifyArgs) -> Result<usize> {
    let saved = SavedSpectrum::load(&args.spectrum)?;
    let profile = saved.profile()?;
    let result = analyse(&profile, &saved.params, &saved.spectrum, args.modes)?;
    Ok(report(&profile, &result))
}
