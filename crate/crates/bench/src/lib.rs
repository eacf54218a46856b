//! Shared inputs for the benchmarks.

use beta_os_core::{build_grid, energy_integrals, solve_spectrum, EnergyFunctionals, FlowParameters, SpectralGrid, VelocityProfile};

/// Plane Poiseuille flow at α = 1, R = 10⁴, β = 0.
pub fn poiseuille_case() -> (VelocityProfile, FlowParameters) {
    (
        VelocityProfile::poiseuille(),
        FlowParameters::new(1.0, 1e4, 0.0).expect("valid parameters"),
    )
}

/// Least stable converged eigenfunction of [`poiseuille_case`] at degree `n`.
pub fn poiseuille_mode(n: usize) -> (SpectralGrid, Vec<beta_os_core::Complex64>) {
    let (profile, params) = poiseuille_case();
    let spectrum = solve_spectrum(&profile, &params, n).expect("solve succeeds");
    let phi = spectrum
        .least_stable_converged()
        .expect("a converged mode")
        .phi
        .clone();
    (build_grid(n).expect("valid degree"), phi)
}

pub fn functionals_of(grid: &SpectralGrid, phi: &[beta_os_core::Complex64]) -> EnergyFunctionals {
    let (profile, params) = poiseuille_case();
    energy_integrals(phi, &profile, &params, grid).expect("grid matches")
}
