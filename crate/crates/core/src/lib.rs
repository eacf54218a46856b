//! Spectral stability analysis of viscous parallel shear flow on the
//! β-plane, with certificates for the a priori bounds on the phase velocity.
//!
//! The pipeline is: pick a [`VelocityProfile`], solve the discrete
//! eigenproblem with [`solve_spectrum`], evaluate [`energy_integrals`] on each
//! converged eigenfunction, then check them with [`verify_identities`] and
//! [`certify`].

pub mod bounds;
pub mod eigensolver;
pub mod error;
pub mod functionals;
pub mod profiles;
pub mod spectral;

pub use bounds::{
    certify, ci_upper_bound, cr_band, stability_threshold, AuditEntry, BandCase, BoundCertificate, CrBand,
    Inequality, AUDIT_TOL, BOUND_TOL,
};
pub use eigensolver::{
    assemble, solve_spectrum, solve_spectrum_with, Eigenpair, FlowParameters, OperatorPair, SolverConfig, Spectrum,
};
pub use error::{Error, Result};
pub use functionals::{energy_integrals, verify_identities, EnergyFunctionals, IdentityReport};
pub use profiles::{builtin_profile, builtin_profile_with, ProfileSource, VelocityProfile, BUILTIN_NAMES};
pub use spectral::{build_grid, SpectralGrid};

pub use num_complex::Complex64;
