use std::f64::consts::PI;

use inls_core::functionals::{self, BoundaryPolicy, PhaseField};
use inls_core::{CartesianGrid, Discretization, Field, Params};

// Gamma(1/4).
const GAMMA_QUARTER: f64 = 3.625_609_908_221_908_3;

fn setup(m: usize, l: f64) -> (Discretization, Field) {
    let grid = CartesianGrid::cell(1, m, l).unwrap();
    let disc = Discretization::new(Params::new(1, 0.5).unwrap(), grid).unwrap();
    (disc, Field::gaussian(grid, 0.8, 1.3).unwrap())
}

#[test]
fn gaussian_moments_match_closed_forms() {
    let (a, w) = (0.8f64, 1.3f64);
    let (disc, u) = setup(512, 20.0);
    let mass = a * a * w * PI.sqrt();
    assert!((functionals::mass(&u).unwrap() / mass - 1.0).abs() < 1e-13);
    let grad = a * a * PI.sqrt() / (2.0 * w);
    assert!((functionals::grad_norm_sq(&u, &disc).unwrap() / grad - 1.0).abs() < 1e-13);
    let gamma = a * a * w.powi(3) * PI.sqrt() / 2.0;
    assert!((functionals::virial_gamma(&u, BoundaryPolicy::Strict).unwrap() / gamma - 1.0).abs() < 1e-12);
}

#[test]
fn potential_integral_converges_to_the_gamma_function_value() {
    // int |x|^{-1/2} a^5 e^{-5x^2/(2w^2)} dx = a^5 Gamma(1/4) (2w^2/5)^{1/4}.
    let (a, w) = (0.8f64, 1.3f64);
    let exact = a.powi(5) * GAMMA_QUARTER * (2.0 * w * w / 5.0).powf(0.25);
    let mut errors = Vec::new();
    for m in [1024, 4096] {
        let (disc, u) = setup(m, 20.0);
        errors.push((functionals::potential_integral(&u, &disc).unwrap() / exact - 1.0).abs());
    }
    assert!(errors[1] < 1e-5, "{errors:?}");
    assert!(errors[0] / errors[1] > 12.0, "second order: {errors:?}");
}

#[test]
fn real_fields_carry_no_momentum() {
    let (disc, u) = setup(256, 15.0);
    let theta = PhaseField::half_radius_sq(*u.grid());
    assert!(functionals::phase_momentum(&u, &theta, &disc).unwrap().abs() < 1e-13);
    let e = functionals::energy(&u, &disc).unwrap();
    assert_eq!(e.total, e.kinetic - e.potential);
    assert!((e.grad_sq() - functionals::grad_norm_sq(&u, &disc).unwrap()).abs() < 1e-13);
}

#[test]
fn quadratic_phase_momentum_is_half_the_gamma_derivative() {
    // With theta = |x|^2/2, int grad(theta).Im(conj(u) grad u) = Gamma'/4 and
    // the chirp u e^{i c |x|^2} has Gamma' = 8 c Gamma.
    let (disc, u) = setup(1024, 20.0);
    let c = 0.15;
    let theta = PhaseField::half_radius_sq(*u.grid());
    let chirped = functionals::modulate(&u, &theta, 2.0 * c).unwrap();
    let mom = functionals::phase_momentum(&chirped, &theta, &disc).unwrap();
    let gamma = functionals::virial_gamma(&u, BoundaryPolicy::Ignore).unwrap();
    assert!((mom / (2.0 * c * gamma) - 1.0).abs() < 1e-10);
    let gp = functionals::virial_gamma_prime(&chirped, &disc, BoundaryPolicy::Ignore).unwrap();
    assert!((gp / (8.0 * c * gamma) - 1.0).abs() < 1e-10);
}

#[test]
fn strict_boundary_policy_rejects_truncated_data() {
    let grid = CartesianGrid::cell(1, 64, 3.0).unwrap();
    let u = Field::gaussian(grid, 1.0, 2.0).unwrap();
    assert!(functionals::virial_gamma(&u, BoundaryPolicy::Strict).is_err());
    assert!(functionals::virial_gamma(&u, BoundaryPolicy::Ignore).is_ok());
}

#[test]
fn subcritical_bound_needs_subcritical_mass() {
    let (disc, u) = setup(256, 15.0);
    let m = functionals::mass(&u).unwrap();
    let e = functionals::energy(&u, &disc).unwrap().total;
    assert!(functionals::subcritical_grad_bound(e, m, 0.9 * m, &disc).is_err());
    let bound = functionals::subcritical_grad_bound(e, m, 2.0 * m, &disc).unwrap();
    let expected = 2.0 * e / (1.0 - 0.5f64.powf(1.5));
    assert!((bound / expected - 1.0).abs() < 1e-14);
}
