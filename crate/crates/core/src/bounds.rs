//! A priori bounds on the phase velocity and their certification.
//!
//! * growth-rate ceiling: `c_i <= q/(2α) - (π²/4 + α²)/(αR)`, `q = max|DU|`;
//! * sufficient stability: the ceiling is negative for `R < 2(π²/4 + α²)/q`;
//! * `c_r` bands: three cases depending on where β sits relative to
//!   `D²U_min/2` and `D²U_max/2`.
//!
//! [`certify`] also evaluates, on the actual eigenfunction, each inequality
//! the bounds are assembled from.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::eigensolver::{Eigenpair, FlowParameters};
use crate::functionals::EnergyFunctionals;
use crate::profiles::VelocityProfile;

/// Slack allowed on the ceiling and the band for discrete eigenpairs.
pub const BOUND_TOL: f64 = 1e-6;
/// Slack allowed on the audited intermediate inequalities.
pub const AUDIT_TOL: f64 = 1e-8;

/// Sharp Poincaré constant for functions vanishing at `z = ±1`.
const POINCARE: f64 = PI * PI / 4.0;

/// Upper bound on `c_i` for wave number α, Reynolds number R and `q = max|DU|`.
pub fn ci_upper_bound(params: &FlowParameters, q: f64) -> f64 {
    let a = params.alpha;
    q / (2.0 * a) - (POINCARE + a * a) / (a * params.reynolds)
}

/// Reynolds number below which every mode at wave number `alpha` decays.
///
/// Returns `f64::INFINITY` when `q == 0`: the ceiling is then negative for
/// every R.
pub fn stability_threshold(alpha: f64, q: f64) -> f64 {
    if q == 0.0 {
        f64::INFINITY
    } else {
        2.0 * (POINCARE + alpha * alpha) / q
    }
}

/// Which `c_r` band applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BandCase {
    /// `β < D²U_min / 2`
    CaseI,
    /// `D²U_min / 2 <= β <= D²U_max / 2`
    CaseII,
    /// `β > D²U_max / 2`
    CaseIII,
}

impl BandCase {
    pub fn as_str(self) -> &'static str {
        match self {
            BandCase::CaseI => "case_i",
            BandCase::CaseII => "case_ii",
            BandCase::CaseIII => "case_iii",
        }
    }
}

impl fmt::Display for BandCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrBand {
    pub case: BandCase,
    pub lower: f64,
    pub upper: f64,
}

impl CrBand {
    pub fn contains(&self, cr: f64, tol: f64) -> bool {
        self.lower - tol <= cr && cr <= self.upper + tol
    }
}

/// The admissible interval for `c_r`.
///
/// With `G(x) = 4(x/2 - β)/(π² + 4α²)`, the band is `(U_min, U_max + G(D²U_max))`,
/// `(U_min + G(D²U_min), U_max + G(D²U_max))` or `(U_min + G(D²U_min), U_max)`.
/// Ties go to the middle case, where neighbouring formulas coincide.
pub fn cr_band(profile: &VelocityProfile, alpha: f64, beta: f64) -> CrBand {
    let e = profile.extrema();
    let shift = |x: f64| 4.0 * (x / 2.0 - beta) / (PI * PI + 4.0 * alpha * alpha);
    let (half_min, half_max) = (e.d2u_min / 2.0, e.d2u_max / 2.0);
    if beta < half_min {
        CrBand {
            case: BandCase::CaseI,
            lower: e.u_min,
            upper: e.u_max + shift(e.d2u_max),
        }
    } else if beta <= half_max {
        CrBand {
            case: BandCase::CaseII,
            lower: e.u_min + shift(e.d2u_min),
            upper: e.u_max + shift(e.d2u_max),
        }
    } else {
        CrBand {
            case: BandCase::CaseIII,
            lower: e.u_min + shift(e.d2u_min),
            upper: e.u_max,
        }
    }
}

/// The intermediate inequalities behind the bounds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Inequality {
    /// `Im Q <= q I₁ I₀` (Cauchy–Schwarz).
    SchwarzImQ,
    /// `I₁² + α²I₀² >= 2α I₁ I₀`.
    MeanProduct,
    /// `I₂² + 2α²I₁² + α⁴I₀² >= (π²/4 + α²)(I₁² + α²I₀²)`.
    Dissipation,
    /// `I₁² >= (π²/4) I₀²`.
    Poincare,
    /// `I₀² / (I₁² + α²I₀²) <= 4/(π² + 4α²)`.
    QuotientCeiling,
}

impl Inequality {
    pub const ALL: [Inequality; 5] = [
        Inequality::SchwarzImQ,
        Inequality::MeanProduct,
        Inequality::Dissipation,
        Inequality::Poincare,
        Inequality::QuotientCeiling,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Inequality::SchwarzImQ => "schwarz_im_q",
            Inequality::MeanProduct => "mean_product",
            Inequality::Dissipation => "dissipation",
            Inequality::Poincare => "poincare",
            Inequality::QuotientCeiling => "quotient_ceiling",
        }
    }
}

/// One audited inequality; `margin >= 0` means it holds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditEntry {
    pub inequality: Inequality,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
}

/// Per-mode record of every bound and audited inequality.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundCertificate {
    pub ci_ceiling: f64,
    /// `ci_ceiling - c_i`
    pub ci_margin: f64,
    pub cr_band: CrBand,
    pub cr_in_band: bool,
    pub audit: Vec<AuditEntry>,
    pub stability_threshold_r: f64,
}

impl BoundCertificate {
    /// Descriptions of every bound broken beyond its tolerance.
    pub fn violations(&self, c: Complex64) -> Vec<String> {
        let mut out = Vec::new();
        if self.ci_margin < -BOUND_TOL {
            out.push(format!(
                "c_i = {:.10e} exceeds ceiling {:.10e}",
                c.im, self.ci_ceiling
            ));
        }
        if !self.cr_in_band {
            out.push(format!(
                "c_r = {:.10e} outside {} band ({:.10e}, {:.10e})",
                c.re, self.cr_band.case, self.cr_band.lower, self.cr_band.upper
            ));
        }
        for entry in &self.audit {
            if entry.margin < -AUDIT_TOL {
                out.push(format!(
                    "{} fails: lhs {:.10e}, rhs {:.10e}",
                    entry.inequality.as_str(),
                    entry.lhs,
                    entry.rhs
                ));
            }
        }
        out
    }

    pub fn is_sound(&self, c: Complex64) -> bool {
        self.violations(c).is_empty()
    }

    pub fn min_audit_margin(&self) -> f64 {
        self.audit.iter().map(|e| e.margin).fold(f64::INFINITY, f64::min)
    }
}

pub fn certify(
    pair: &Eigenpair,
    ef: &EnergyFunctionals,
    profile: &VelocityProfile,
    params: &FlowParameters,
) -> BoundCertificate {
    certify_at(pair.c, ef, profile, params)
}

pub fn certify_at(
    c: Complex64,
    ef: &EnergyFunctionals,
    profile: &VelocityProfile,
    params: &FlowParameters,
) -> BoundCertificate {
    let q = profile.q();
    let alpha = params.alpha;
    let ci_ceiling = ci_upper_bound(params, q);
    let band = cr_band(profile, alpha, params.beta);
    let audit = audit_inequalities(ef, alpha, q);
    BoundCertificate {
        ci_ceiling,
        ci_margin: ci_ceiling - c.im,
        cr_band: band,
        cr_in_band: band.contains(c.re, BOUND_TOL),
        audit,
        stability_threshold_r: stability_threshold(alpha, q),
    }
}

/// Evaluates the intermediate inequalities on a single eigenfunction.
pub fn audit_inequalities(ef: &EnergyFunctionals, alpha: f64, q: f64) -> Vec<AuditEntry> {
    let i0 = ef.i0sq.sqrt();
    let i1 = ef.i1sq.sqrt();
    let kinetic = ef.kinetic(alpha);
    let at_most = |inequality, lhs: f64, rhs: f64| AuditEntry {
        inequality,
        lhs,
        rhs,
        margin: rhs - lhs,
    };
    let at_least = |inequality, lhs: f64, rhs: f64| AuditEntry {
        inequality,
        lhs,
        rhs,
        margin: lhs - rhs,
    };
    vec![
        at_most(Inequality::SchwarzImQ, ef.im_q, q * i1 * i0),
        at_least(Inequality::MeanProduct, kinetic, 2.0 * alpha * i1 * i0),
        at_least(
            Inequality::Dissipation,
            ef.dissipation(alpha),
            (POINCARE + alpha * alpha) * kinetic,
        ),
        at_least(Inequality::Poincare, ef.i1sq, POINCARE * ef.i0sq),
        at_most(
            Inequality::QuotientCeiling,
            ef.i0sq / kinetic,
            4.0 / (PI * PI + 4.0 * alpha * alpha),
        ),
    ]
}
