//! Discrete β-plane Orr–Sommerfeld problem and its generalized spectrum.
//!
//! The disturbance equation
//!
//! ```text
//! (U - c)(D² - α²)φ - (D²U - β)φ = (D² - α²)²φ / (iαR)
//! ```
//!
//! is collocated at the interior Chebyshev points with trial functions
//! `φ = (1 - z²) p(z)`, `p(±1) = 0`, so `φ = Dφ = 0` at both walls holds for
//! every trial function. This gives the linear pencil `A φ = c B φ` with
//!
//! ```text
//! A = diag(U)(D² - α²) - diag(D²U - β) - (D² - α²)² / (iαR)
//! B = D² - α²
//! ```
//!
//! Spurious modes are filtered by re-solving at a finer resolution and
//! keeping only eigenvalues that reappear.

use faer::diag::Diag;
use faer::dyn_stack::{MemBuffer, MemStack};
use faer::linalg::evd::ComputeEigenvectors;
use faer::linalg::gevd;
use faer::linalg::solvers::DenseSolveCore;
use faer::{Mat, Par};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::energy_norm;
use crate::profiles::VelocityProfile;
use crate::spectral::{build_grid, SpectralGrid};

/// Smallest resolution accepted by [`solve_spectrum`].
pub const MIN_SOLVE_DEGREE: usize = 32;
pub const DEFAULT_DEGREE: usize = 128;
pub const DEFAULT_FILTER_TOL: f64 = 1e-6;

/// Wave number α, Reynolds number R and Coriolis gradient β.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowParameters {
    pub alpha: f64,
    pub reynolds: f64,
    pub beta: f64,
}

impl FlowParameters {
    pub fn new(alpha: f64, reynolds: f64, beta: f64) -> Result<Self> {
        let params = Self { alpha, reynolds, beta };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.alpha.is_finite() || !self.reynolds.is_finite() || !self.beta.is_finite() {
            return Err(Error::Config("flow parameters must be finite".into()));
        }
        if self.alpha <= 0.0 {
            return Err(Error::Config("alpha must be positive".into()));
        }
        if self.reynolds <= 0.0 {
            return Err(Error::Config("reynolds must be positive".into()));
        }
        Ok(())
    }
}

/// One computed mode.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Eigenpair {
    /// Complex phase velocity `c_r + i c_i`.
    pub c: Complex64,
    /// Eigenfunction on the full grid (walls included), normalized so that
    /// `I₁² + α² I₀² = 1` and real positive where `|φ|` peaks.
    pub phi: Vec<Complex64>,
    /// `‖Aφ - cBφ‖ / (‖A‖ ‖φ‖)` on the assembled pencil.
    pub residual: f64,
    pub converged: bool,
    /// Distance to the nearest eigenvalue at the check resolution.
    pub drift: f64,
}

/// Resolution and spurious-mode filter settings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub n: usize,
    /// Check resolution; `None` means `n + n / 2`.
    pub check_n: Option<usize>,
    /// Absolute agreement required between the two resolutions.
    pub filter_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            n: DEFAULT_DEGREE,
            check_n: None,
            filter_tol: DEFAULT_FILTER_TOL,
        }
    }
}

impl SolverConfig {
    pub fn with_degree(n: usize) -> Self {
        Self {
            n,
            ..Self::default()
        }
    }

    pub fn check_degree(&self) -> usize {
        self.check_n.unwrap_or(self.n + self.n / 2)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < MIN_SOLVE_DEGREE {
            return Err(Error::Config(format!(
                "resolution n must be at least {MIN_SOLVE_DEGREE}, got {}",
                self.n
            )));
        }
        if self.check_degree() == self.n {
            return Err(Error::Config("check resolution must differ from n".into()));
        }
        if !(self.filter_tol > 0.0) {
            return Err(Error::Config("filter tolerance must be positive".into()));
        }
        Ok(())
    }
}

/// All finite eigenpairs at one resolution, least stable first.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub n: usize,
    pub check_n: usize,
    pub pairs: Vec<Eigenpair>,
    /// Set when no mode survived the resolution filter.
    pub no_converged_modes: bool,
}

impl Spectrum {
    pub fn converged(&self) -> impl Iterator<Item = &Eigenpair> {
        self.pairs.iter().filter(|p| p.converged)
    }

    pub fn least_stable_converged(&self) -> Option<&Eigenpair> {
        self.converged().next()
    }
}

/// Dense pencil restricted to the `n - 1` interior unknowns.
#[derive(Clone, Debug)]
pub struct OperatorPair {
    pub a: Mat<Complex64>,
    pub b: Mat<Complex64>,
}

/// Unknowns of the assembled pencil.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Unknowns {
    /// Interior values of φ.
    Phi,
    /// Interior values of `p = φ / (1 - z²)`.
    Reduced,
}

/// Builds `(A, B)` with interior values of φ as unknowns.
pub fn assemble(profile: &VelocityProfile, params: &FlowParameters, grid: &SpectralGrid) -> Result<OperatorPair> {
    params.validate()?;
    assemble_in(profile, params, grid, Unknowns::Phi)
}

fn assemble_in(
    profile: &VelocityProfile,
    params: &FlowParameters,
    grid: &SpectralGrid,
    unknowns: Unknowns,
) -> Result<OperatorPair> {
    let n = grid.degree();
    let m = n - 1;
    let z = grid.points();
    let wall = grid.wall_factor();
    let base = profile.sample(z)?;
    let (d1, d2, d3, d4) = (grid.d1(), grid.d2(), grid.d3(), grid.d4());
    let a2 = params.alpha * params.alpha;
    // -1 / (iαR) = i / (αR)
    let visc = Complex64::new(0.0, 1.0 / (params.alpha * params.reynolds));

    let mut a = Mat::<Complex64>::zeros(m, m);
    let mut b = Mat::<Complex64>::zeros(m, m);
    for i in 1..n {
        let (zi, wi) = (z[i], wall[i]);
        let u = base.u[i];
        let zeroth = base.d2u[i] - params.beta;
        for j in 1..n {
            let delta = if i == j { 1.0 } else { 0.0 };
            // D² and D⁴ of (1 - z²) ℓ_j(z), ℓ_j the Lagrange cardinal of node j.
            let mut lap2 = wi * d2[(i, j)] - 4.0 * zi * d1[(i, j)] - 2.0 * delta;
            let mut lap4 = wi * d4[(i, j)] - 8.0 * zi * d3[(i, j)] - 12.0 * d2[(i, j)];
            let mut ident = delta;
            if unknowns == Unknowns::Phi {
                lap2 /= wall[j];
                lap4 /= wall[j];
            } else {
                ident *= wall[j];
            }
            let lap = lap2 - a2 * ident;
            let bilap = lap4 - 2.0 * a2 * lap2 + a2 * a2 * ident;
            a[(i - 1, j - 1)] = Complex64::new(u * lap - zeroth * ident, 0.0) + visc * bilap;
            b[(i - 1, j - 1)] = Complex64::new(lap, 0.0);
        }
    }
    Ok(OperatorPair { a, b })
}

/// Scales each row of the pair by its largest entry magnitude.
fn equilibrate_rows(pair: &mut OperatorPair) {
    let m = pair.a.nrows();
    for i in 0..m {
        let scale = (0..m)
            .map(|j| pair.a[(i, j)].norm().max(pair.b[(i, j)].norm()))
            .fold(0.0, f64::max);
        if scale > 0.0 {
            let inv = 1.0 / scale;
            for j in 0..m {
                pair.a[(i, j)] *= inv;
                pair.b[(i, j)] *= inv;
            }
        }
    }
}

struct RawSpectrum {
    values: Vec<Complex64>,
    /// Interior values of p, one column per eigenvalue.
    vectors: Mat<Complex64>,
}

fn frobenius(m: &Mat<Complex64>) -> f64 {
    let mut s = 0.0;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            s += m[(i, j)].norm_sqr();
        }
    }
    s.sqrt()
}

fn condition_estimate(b: &Mat<Complex64>) -> f64 {
    let inf_norm = |m: &Mat<Complex64>| {
        (0..m.nrows())
            .map(|i| (0..m.ncols()).map(|j| m[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    };
    let inv = b.partial_piv_lu().inverse();
    inf_norm(b) * inf_norm(&inv)
}

/// Runs the QZ decomposition on the balanced pencil, sequentially so the
/// result does not depend on thread scheduling.
///
/// The transformations are always accumulated: the backend's
/// eigenvalue-only path loses accuracy on these pencils.
fn raw_spectrum(profile: &VelocityProfile, params: &FlowParameters, grid: &SpectralGrid) -> Result<RawSpectrum> {
    let mut pair = assemble_in(profile, params, grid, Unknowns::Reduced)?;
    equilibrate_rows(&mut pair);
    let m = pair.a.nrows();
    let par = Par::Seq;
    let mut alpha = Diag::<Complex64>::zeros(m);
    let mut beta = Diag::<Complex64>::zeros(m);
    let mut vectors = Mat::<Complex64>::zeros(m, m);
    let mut a = pair.a.clone();
    let mut b = pair.b.clone();
    let mut mem = MemBuffer::new(gevd::gevd_scratch::<Complex64>(
        m,
        ComputeEigenvectors::No,
        ComputeEigenvectors::Yes,
        par,
        Default::default(),
    ));
    let outcome = gevd::gevd_cplx(
        a.as_mut(),
        b.as_mut(),
        alpha.as_mut(),
        beta.as_mut(),
        None,
        Some(vectors.as_mut()),
        par,
        MemStack::new(&mut mem),
        Default::default(),
    );
    if let Err(err) = outcome {
        return Err(Error::Numerical {
            reason: format!("{err:?}"),
            norm_a: frobenius(&pair.a),
            norm_b: frobenius(&pair.b),
            cond_b: condition_estimate(&pair.b),
        });
    }
    let values = (0..m)
        .map(|k| {
            let (num, den) = (alpha[k], beta[k]);
            if den.norm() == 0.0 {
                Complex64::new(f64::INFINITY, 0.0)
            } else {
                num / den
            }
        })
        .collect();
    Ok(RawSpectrum { values, vectors })
}

/// Solves at the default filter settings with resolution `n`.
pub fn solve_spectrum(profile: &VelocityProfile, params: &FlowParameters, n: usize) -> Result<Spectrum> {
    solve_spectrum_with(profile, params, &SolverConfig::with_degree(n))
}

pub fn solve_spectrum_with(
    profile: &VelocityProfile,
    params: &FlowParameters,
    config: &SolverConfig,
) -> Result<Spectrum> {
    params.validate()?;
    config.validate()?;
    let grid = build_grid(config.n)?;
    let check_grid = build_grid(config.check_degree())?;

    let fine = raw_spectrum(profile, params, &grid)?;
    let check = raw_spectrum(profile, params, &check_grid)?;
    let check_values: Vec<Complex64> = check.values.into_iter().filter(|c| c.is_finite()).collect();
    let vectors = fine.vectors;
    let operators = assemble_in(profile, params, &grid, Unknowns::Phi)?;
    let norm_a = frobenius(&operators.a);

    let n = config.n;
    let wall = grid.wall_factor();
    let mut pairs = Vec::new();
    for (k, &c) in fine.values.iter().enumerate() {
        if !c.is_finite() {
            continue;
        }
        let mut phi = vec![Complex64::new(0.0, 0.0); n + 1];
        for j in 1..n {
            phi[j] = vectors[(j - 1, k)] * wall[j];
        }
        normalize(&mut phi, params.alpha, &grid)?;
        let residual = pencil_residual(&operators, norm_a, c, &phi[1..n]);
        let drift = check_values
            .iter()
            .map(|&other| (other - c).norm())
            .fold(f64::INFINITY, f64::min);
        pairs.push(Eigenpair {
            c,
            phi,
            residual,
            converged: drift < config.filter_tol,
            drift,
        });
    }
    pairs.sort_by(|x, y| y.c.im.total_cmp(&x.c.im).then(x.c.re.total_cmp(&y.c.re)));
    let no_converged_modes = !pairs.iter().any(|p| p.converged);
    Ok(Spectrum {
        n,
        check_n: config.check_degree(),
        pairs,
        no_converged_modes,
    })
}

/// Scales φ to unit `I₁² + α² I₀²` and rotates it real positive at its peak.
fn normalize(phi: &mut [Complex64], alpha: f64, grid: &SpectralGrid) -> Result<()> {
    let (peak, _) = phi
        .iter()
        .enumerate()
        .fold((0, -1.0), |(best, mag), (i, v)| if v.norm() > mag { (i, v.norm()) } else { (best, mag) });
    let phase = phi[peak].conj() / phi[peak].norm();
    for v in phi.iter_mut() {
        *v *= phase;
    }
    let scale = 1.0 / energy_norm(phi, alpha, grid)?.sqrt();
    for v in phi.iter_mut() {
        *v *= scale;
    }
    Ok(())
}

fn pencil_residual(ops: &OperatorPair, norm_a: f64, c: Complex64, phi: &[Complex64]) -> f64 {
    let m = phi.len();
    let mut sq = 0.0;
    for i in 0..m {
        let mut r = Complex64::new(0.0, 0.0);
        for j in 0..m {
            r += (ops.a[(i, j)] - c * ops.b[(i, j)]) * phi[j];
        }
        sq += r.norm_sqr();
    }
    let phi_norm = phi.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    sq.sqrt() / (norm_a * phi_norm)
}
