use beta_os_core::eigensolver::MIN_SOLVE_DEGREE;
use beta_os_core::{
    assemble, build_grid, builtin_profile, solve_spectrum, solve_spectrum_with, Complex64, FlowParameters,
    SolverConfig, Spectrum, VelocityProfile, BUILTIN_NAMES,
};
use faer::Mat;
use proptest::prelude::*;

fn solve(name: &str, alpha: f64, reynolds: f64, beta: f64, n: usize) -> Spectrum {
    let p = builtin_profile(name).unwrap();
    solve_spectrum(&p, &FlowParameters::new(alpha, reynolds, beta).unwrap(), n).unwrap()
}

fn nearest(values: impl Iterator<Item = Complex64>, c: Complex64) -> f64 {
    values.map(|v| (v - c).norm()).fold(f64::INFINITY, f64::min)
}

#[test]
fn poiseuille_least_stable_mode() {
    // Reference value of the well-known unstable mode at α = 1, R = 10⁴.
    let s = solve("poiseuille", 1.0, 1e4, 0.0, 128);
    let c = s.least_stable_converged().unwrap().c;
    assert!((c.re - 0.2375).abs() < 5e-4 && (c.im - 0.0037).abs() < 5e-4, "{c}");
    let reference = Complex64::new(0.237_526_488_820_47, 0.003_739_670_617_58);
    assert!((c - reference).norm() < 1e-8, "{c}");
}

#[test]
fn poiseuille_marginal_point() {
    let coarse = solve("poiseuille", 1.02056, 5772.22, 0.0, 128);
    let c = coarse.least_stable_converged().unwrap().c;
    assert!(c.im.abs() < 5e-4, "{c}");
    assert!((c.re - 0.264).abs() < 2e-3, "{c}");
    for n in [192, 256] {
        let fine = solve("poiseuille", 1.02056, 5772.22, 0.0, n);
        let cf = fine.least_stable_converged().unwrap().c;
        assert!((cf - c).norm() < 1e-6, "n = {n}: {cf} vs {c}");
    }
}

#[test]
fn couette_is_stable_at_r1000() {
    let s = solve("couette", 1.0, 1000.0, 0.0, 128);
    assert!(s.converged().count() > 0);
    assert!(s.converged().all(|p| p.c.im < 0.0));
}

#[test]
fn couette_spectrum_is_symmetric() {
    // At higher n the eigenvalue condition numbers of this non-normal
    // operator push rounding in the pair splitting above 1e-8.
    for (alpha, reynolds) in [(1.0, 1000.0), (0.5, 300.0), (2.0, 5000.0)] {
        let s = solve("couette", alpha, reynolds, 0.0, 64);
        for pair in s.converged() {
            let mirror = Complex64::new(-pair.c.re, pair.c.im);
            let d = nearest(s.converged().map(|p| p.c), mirror);
            assert!(d < 1e-8, "{} has no mirror image ({d:e})", pair.c);
        }
    }
}

#[test]
fn converged_residuals_are_small() {
    for name in BUILTIN_NAMES {
        for (alpha, reynolds, beta) in [(1.0, 1e4, 0.0), (0.5, 100.0, -1.0), (2.0, 1e3, 1.0)] {
            let s = solve(name, alpha, reynolds, beta, 96);
            for pair in s.converged() {
                assert!(pair.residual < 1e-8, "{name}: {} residual {:e}", pair.c, pair.residual);
            }
        }
    }
}

#[test]
fn modes_reappear_at_double_resolution() {
    // Modes that agree to 1e-9 between n and 1.5 n also agree to 1e-8 at 2n.
    for name in BUILTIN_NAMES {
        for (alpha, reynolds, beta) in [(1.0, 1e4, 0.0), (0.5, 100.0, -1.0), (2.0, 1e3, 1.0)] {
            let p = builtin_profile(name).unwrap();
            let params = FlowParameters::new(alpha, reynolds, beta).unwrap();
            let config = SolverConfig {
                filter_tol: 1e-9,
                ..SolverConfig::with_degree(64)
            };
            let coarse = solve_spectrum_with(&p, &params, &config).unwrap();
            let fine = solve_spectrum(&p, &params, 128).unwrap();
            assert!(coarse.converged().count() > 0);
            for pair in coarse.converged() {
                let d = nearest(fine.pairs.iter().map(|q| q.c), pair.c);
                assert!(d < 1e-8, "{name} {}: {d:e}", pair.c);
            }
        }
    }
}

#[test]
fn default_filter_modes_reappear_within_filter_tolerance() {
    let p = builtin_profile("poiseuille").unwrap();
    let params = FlowParameters::new(1.0, 1e4, 0.0).unwrap();
    let coarse = solve_spectrum(&p, &params, 64).unwrap();
    let fine = solve_spectrum(&p, &params, 128).unwrap();
    for pair in coarse.converged() {
        assert!(nearest(fine.pairs.iter().map(|q| q.c), pair.c) < 2e-6);
    }
}

#[test]
fn beta_zero_assembly_is_classical() {
    // The classical Orr–Sommerfeld pencil built directly from the grid
    // matrices on the clamped trial functions (1 - z²) ℓ_j / (1 - z_j²).
    let grid = build_grid(40).unwrap();
    let p = VelocityProfile::poiseuille();
    let (alpha, reynolds) = (1.1, 800.0);
    let ops = assemble(&p, &FlowParameters::new(alpha, reynolds, 0.0).unwrap(), &grid).unwrap();
    let z = grid.points();
    let w = grid.wall_factor();
    let a2 = alpha * alpha;
    let visc = Complex64::new(0.0, 1.0 / (alpha * reynolds));
    let mut diff = 0.0f64;
    for i in 1..40 {
        for j in 1..40 {
            let delta = if i == j { 1.0 } else { 0.0 };
            let lap2 = (w[i] * grid.d2()[(i, j)] - 4.0 * z[i] * grid.d1()[(i, j)] - 2.0 * delta) / w[j];
            let lap4 = (w[i] * grid.d4()[(i, j)] - 8.0 * z[i] * grid.d3()[(i, j)] - 12.0 * grid.d2()[(i, j)]) / w[j];
            let lap = lap2 - a2 * delta;
            let bilap = lap4 - 2.0 * a2 * lap2 + a2 * a2 * delta;
            let a = Complex64::new((1.0 - z[i] * z[i]) * lap + 2.0 * delta, 0.0) + visc * bilap;
            diff = diff.max((ops.a[(i - 1, j - 1)] - a).norm());
            diff = diff.max((ops.b[(i - 1, j - 1)] - lap).norm());
        }
    }
    assert_eq!(diff, 0.0);
}

#[test]
fn recombined_b_is_nonsingular() {
    let grid = build_grid(64).unwrap();
    let ops = assemble(&VelocityProfile::couette(), &FlowParameters::new(1.0, 100.0, 0.0).unwrap(), &grid).unwrap();
    let finite = |m: &Mat<Complex64>| (0..m.nrows()).all(|i| (0..m.ncols()).all(|j| m[(i, j)].is_finite()));
    assert!(finite(&ops.a) && finite(&ops.b));
    let s = ops.b.singular_values().unwrap();
    let smallest = s.iter().copied().fold(f64::INFINITY, f64::min);
    let largest = s.iter().copied().fold(0.0, f64::max);
    assert!(smallest > 1e-8 * largest, "smallest singular value {smallest:e}");
}

#[test]
fn rejects_low_resolution() {
    let p = VelocityProfile::couette();
    let params = FlowParameters::new(1.0, 100.0, 0.0).unwrap();
    assert!(solve_spectrum(&p, &params, MIN_SOLVE_DEGREE - 1).is_err());
    assert!(solve_spectrum(&p, &params, MIN_SOLVE_DEGREE).is_ok());
}

#[test]
fn solves_are_deterministic() {
    let a = solve("bickley_jet", 1.0, 1000.0, 0.5, 64);
    let b = solve("bickley_jet", 1.0, 1000.0, 0.5, 64);
    assert_eq!(a, b);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn spectrum_is_continuous_in_beta(index in 0usize..4, alpha in 0.5f64..2.0, log_r in 2.0f64..4.0) {
        let name = BUILTIN_NAMES[index];
        let reynolds = 10f64.powf(log_r);
        let base = solve(name, alpha, reynolds, 0.0, 64);
        let shifted = solve(name, alpha, reynolds, 1e-4, 64);
        for pair in base.converged().take(5) {
            let d = nearest(shifted.pairs.iter().map(|q| q.c), pair.c);
            prop_assert!(d < 1e-3, "{} moved by {:e}", pair.c, d);
        }
    }

    #[test]
    fn eigenfunctions_satisfy_wall_conditions(index in 0usize..4, alpha in 0.3f64..3.0,
                                              log_r in 1.0f64..4.0, beta in -2.0f64..2.0) {
        let s = solve(BUILTIN_NAMES[index], alpha, 10f64.powf(log_r), beta, 48);
        let grid = build_grid(48).unwrap();
        prop_assert!(s.pairs.windows(2).all(|w| w[0].c.im >= w[1].c.im));
        for pair in s.converged() {
            let (dphi, _) = grid.clamped_derivatives(&pair.phi).unwrap();
            prop_assert!(pair.phi[0].norm() < 1e-12 && pair.phi[48].norm() < 1e-12);
            prop_assert!(dphi[0].norm() < 1e-12 && dphi[48].norm() < 1e-12);
        }
    }
}
