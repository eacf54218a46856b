//! Energy integrals of an eigenfunction and the exact identities they obey.
//!
//! Multiplying the disturbance equation by `φ*` and integrating over the
//! channel gives
//!
//! ```text
//! I₂² + 2α²I₁² + α⁴I₀² = iαcR (I₁² + α²I₀²) - iαR Q
//! ```
//!
//! whose real and imaginary parts are quotient formulas for `c_i` and `c_r`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::eigensolver::{Eigenpair, FlowParameters};
use crate::error::Result;
use crate::profiles::VelocityProfile;
use crate::spectral::SpectralGrid;

/// Above this, the discarded imaginary part of `Im Q` is flagged.
pub const IM_Q_DISCARD_FLAG: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyFunctionals {
    /// `∫ |φ|²`
    pub i0sq: f64,
    /// `∫ |Dφ|²`
    pub i1sq: f64,
    /// `∫ |D²φ|²`
    pub i2sq: f64,
    /// `∫ {U(|Dφ|² + α²|φ|²) + (D²U - β)|φ|²} + ∫ DU (Dφ) φ*`
    pub q_complex: Complex64,
    /// `∫ {U(|Dφ|² + α²|φ|²) + (D²U/2 - β)|φ|²}`
    pub re_q: f64,
    /// Real part of `(i/2) ∫ DU {φ Dφ* - (Dφ) φ*}`.
    pub im_q: f64,
    /// Magnitude of the imaginary part dropped from `im_q`.
    pub im_q_discarded: f64,
}

impl EnergyFunctionals {
    /// `I₁² + α² I₀²`
    pub fn kinetic(&self, alpha: f64) -> f64 {
        self.i1sq + alpha * alpha * self.i0sq
    }

    /// `I₂² + 2α² I₁² + α⁴ I₀²`
    pub fn dissipation(&self, alpha: f64) -> f64 {
        let a2 = alpha * alpha;
        self.i2sq + 2.0 * a2 * self.i1sq + a2 * a2 * self.i0sq
    }

    pub fn im_q_flagged(&self) -> bool {
        self.im_q_discarded > IM_Q_DISCARD_FLAG
    }
}

/// Defects of the energy identity and the two quotient formulas.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    /// `|LHS - RHS| / (|LHS| + |RHS|)` of the energy identity.
    pub identity_residual: f64,
    /// `|c_r - Re Q / (I₁² + α²I₀²)|`
    pub cr_formula_error: f64,
    /// `|c_i - [Im Q - (I₂² + 2α²I₁² + α⁴I₀²)/(αR)] / (I₁² + α²I₀²)|`
    pub ci_formula_error: f64,
}

impl IdentityReport {
    pub fn max_defect(&self) -> f64 {
        self.identity_residual
            .max(self.cr_formula_error)
            .max(self.ci_formula_error)
    }
}

/// `I₁² + α² I₀²` of a clamped grid function.
pub fn energy_norm(phi: &[Complex64], alpha: f64, grid: &SpectralGrid) -> Result<f64> {
    let [phi, dphi, _] = grid.clamped_fine(phi)?;
    let i0: Vec<f64> = phi.iter().map(|v| v.norm_sqr()).collect();
    let i1: Vec<f64> = dphi.iter().map(|v| v.norm_sqr()).collect();
    Ok(grid.integrate_fine(&i1)? + alpha * alpha * grid.integrate_fine(&i0)?)
}

/// Evaluates every energy integral for `phi` on `grid`.
///
/// Derivatives follow the clamped representation of
/// [`SpectralGrid::clamped_derivatives`]; integrals run on the fine
/// quadrature grid, where they are exact for polynomial profiles.
pub fn energy_integrals(
    phi: &[Complex64],
    profile: &VelocityProfile,
    params: &FlowParameters,
    grid: &SpectralGrid,
) -> Result<EnergyFunctionals> {
    let [phi, dphi, d2phi] = grid.clamped_fine(phi)?;
    let base = profile.sample(grid.fine_points())?;
    let a2 = params.alpha * params.alpha;
    let np = phi.len();

    let mut f0 = Vec::with_capacity(np);
    let mut f1 = Vec::with_capacity(np);
    let mut f2 = Vec::with_capacity(np);
    let mut q_density = Vec::with_capacity(np);
    let mut re_density = Vec::with_capacity(np);
    let mut im_density = Vec::with_capacity(np);
    for j in 0..np {
        let (u, du, d2u) = (base.u[j], base.du[j], base.d2u[j]);
        let p0 = phi[j].norm_sqr();
        let p1 = dphi[j].norm_sqr();
        f0.push(p0);
        f1.push(p1);
        f2.push(d2phi[j].norm_sqr());
        let kinetic = u * (p1 + a2 * p0);
        q_density.push(Complex64::new(kinetic + (d2u - params.beta) * p0, 0.0) + dphi[j] * phi[j].conj() * du);
        re_density.push(kinetic + (0.5 * d2u - params.beta) * p0);
        let bracket = phi[j] * dphi[j].conj() - dphi[j] * phi[j].conj();
        im_density.push(Complex64::new(0.0, 0.5) * bracket * du);
    }
    let im_q = grid.integrate_fine(&im_density)?;
    Ok(EnergyFunctionals {
        i0sq: grid.integrate_fine(&f0)?,
        i1sq: grid.integrate_fine(&f1)?,
        i2sq: grid.integrate_fine(&f2)?,
        q_complex: grid.integrate_fine(&q_density)?,
        re_q: grid.integrate_fine(&re_density)?,
        im_q: im_q.re,
        im_q_discarded: im_q.im.abs(),
    })
}

/// Checks the energy identity and quotient formulas for a computed mode.
pub fn verify_identities(pair: &Eigenpair, ef: &EnergyFunctionals, params: &FlowParameters) -> IdentityReport {
    verify_identities_at(pair.c, ef, params)
}

pub fn verify_identities_at(c: Complex64, ef: &EnergyFunctionals, params: &FlowParameters) -> IdentityReport {
    let alpha = params.alpha;
    let ar = alpha * params.reynolds;
    let kinetic = ef.kinetic(alpha);
    let dissipation = ef.dissipation(alpha);
    let i = Complex64::new(0.0, 1.0);
    let lhs = Complex64::new(dissipation, 0.0);
    let rhs = i * c * (ar * kinetic) - i * ef.q_complex * ar;
    let denom = lhs.norm() + rhs.norm();
    let identity_residual = if denom > 0.0 { (lhs - rhs).norm() / denom } else { 0.0 };
    let cr = ef.re_q / kinetic;
    let ci = (ef.im_q - dissipation / ar) / kinetic;
    IdentityReport {
        identity_residual,
        cr_formula_error: (c.re - cr).abs(),
        ci_formula_error: (c.im - ci).abs(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::build_grid;

    fn bump(grid: &SpectralGrid) -> Vec<Complex64> {
        grid.points()
            .iter()
            .map(|z| Complex64::new((1.0 - z * z).powi(2), 0.0))
            .collect()
    }

    #[test]
    fn bump_integrals() {
        let grid = build_grid(32).unwrap();
        let params = FlowParameters::new(1.0, 100.0, 0.0).unwrap();
        let ef = energy_integrals(&bump(&grid), &VelocityProfile::couette(), &params, &grid).unwrap();
        assert!((ef.i0sq - 256.0 / 315.0).abs() < 1e-10);
        assert!((ef.i1sq - 256.0 / 105.0).abs() < 1e-10);
        assert!((ef.i2sq - 25.6).abs() < 1e-10);
    }

    #[test]
    fn couette_bump_has_vanishing_q() {
        let grid = build_grid(32).unwrap();
        let params = FlowParameters::new(1.0, 100.0, 0.0).unwrap();
        let ef = energy_integrals(&bump(&grid), &VelocityProfile::couette(), &params, &grid).unwrap();
        assert!(ef.re_q.abs() < 1e-12);
        assert!(ef.im_q.abs() < 1e-12);
    }

    #[test]
    fn poiseuille_bump_re_q() {
        // Symbolic: ∫ {(1 - z²)(|Dφ|² + |φ|²) - |φ|²} dz = 256/165.
        let grid = build_grid(32).unwrap();
        let params = FlowParameters::new(1.0, 100.0, 0.0).unwrap();
        let ef = energy_integrals(&bump(&grid), &VelocityProfile::poiseuille(), &params, &grid).unwrap();
        assert!((ef.re_q - 256.0 / 165.0).abs() < 1e-12);
        assert!((ef.q_complex.re - 256.0 / 165.0).abs() < 1e-12);
        assert!(ef.q_complex.im.abs() < 1e-12);
    }

    #[test]
    fn tanh_bump_re_q_with_beta() {
        // Symbolic: the odd terms drop and re_q = -β ∫ |φ|² = -128/315 at β = 1/2.
        let grid = build_grid(64).unwrap();
        let params = FlowParameters::new(1.0, 100.0, 0.5).unwrap();
        let profile = VelocityProfile::tanh_layer(1.0).unwrap();
        let ef = energy_integrals(&bump(&grid), &profile, &params, &grid).unwrap();
        assert!((ef.re_q + 128.0 / 315.0).abs() < 1e-12);
    }

    #[test]
    fn shape_mismatch() {
        let grid = build_grid(16).unwrap();
        let params = FlowParameters::new(1.0, 100.0, 0.0).unwrap();
        let phi = vec![Complex64::new(0.0, 0.0); 5];
        assert!(energy_integrals(&phi, &VelocityProfile::couette(), &params, &grid).is_err());
    }

    #[test]
    fn exact_pair_has_zero_residual() {
        // Functionals consistent with c through the quotient formulas satisfy
        // the identity exactly.
        let params = FlowParameters::new(1.3, 250.0, 0.2).unwrap();
        let ef = EnergyFunctionals {
            i0sq: 0.4,
            i1sq: 1.1,
            i2sq: 7.0,
            q_complex: Complex64::new(0.35, 0.02),
            re_q: 0.35,
            im_q: 0.02,
            im_q_discarded: 0.0,
        };
        let k = ef.kinetic(params.alpha);
        let c = Complex64::new(
            ef.re_q / k,
            (ef.im_q - ef.dissipation(params.alpha) / (params.alpha * params.reynolds)) / k,
        );
        let report = verify_identities_at(c, &ef, &params);
        assert!(report.identity_residual < 1e-15);
        assert!(report.cr_formula_error < 1e-15 && report.ci_formula_error < 1e-15);
    }
}
