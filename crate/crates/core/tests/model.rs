use inls_core::model::{critical_power, potential_weights, sphere_area, weights, WeightRule};
use inls_core::{CartesianGrid, Centering, InlsError, Params};

#[test]
fn parameter_range_is_enforced() {
    for (n, b) in [(1, 0.0), (1, 1.0), (1, -0.1), (2, 2.0), (3, 2.5), (1, f64::NAN)] {
        assert!(Params::new(n, b).is_err(), "N={n} b={b}");
    }
    let err = Params::new(1, 1.2).unwrap_err();
    assert!(matches!(err, InlsError::InvalidParams(_)));
    assert!(err.to_string().contains("0 < b < min{2, N}"), "{err}");
    assert!(Params::new(0, 0.5).is_err());
    assert!(Params::new(3, 1.9).is_ok());
    assert_eq!(Params::classic(1).unwrap().p(), 5.0);
}

#[test]
fn critical_power_and_exponents() {
    assert_eq!(critical_power(1, 0.5), 4.0);
    assert_eq!(critical_power(2, 1.0), 2.0);
    assert!((critical_power(3, 1.0) - 5.0 / 3.0).abs() < 1e-15);
    let p = Params::with_power(1, 0.5, 3.0).unwrap();
    assert!(!p.is_critical());
    assert_eq!(p.p(), 3.0);
    assert!(Params::with_power(1, 0.5, 4.0).unwrap().is_critical());
    assert!(Params::with_power(3, 1.0, 3.0).is_err(), "energy-critical power is 3");
    assert!((sphere_area(3) - 4.0 * std::f64::consts::PI).abs() < 1e-14);
}

#[test]
fn cell_centered_grid_avoids_the_origin() {
    let g = CartesianGrid::cell(1, 8, 2.0).unwrap();
    assert_eq!(g.spacing(), 0.5);
    assert_eq!(g.axis_coords(), vec![-1.75, -1.25, -0.75, -0.25, 0.25, 0.75, 1.25, 1.75]);
    assert_eq!(g.min_radius(), 0.25);
    let k = g.wavenumbers();
    assert_eq!(k[4], 0.0, "Nyquist mode is zeroed");
    assert!((k[1] - std::f64::consts::PI / 2.0).abs() < 1e-15);
    assert!(CartesianGrid::cell(1, 7, 1.0).is_err());
    assert!(CartesianGrid::cell(1, 8, -1.0).is_err());
}

#[test]
fn ravel_inverts_unravel() {
    let g = CartesianGrid::cell(3, 6, 1.0).unwrap();
    assert_eq!(g.len(), 216);
    for i in [0, 1, 7, 100, 215] {
        let idx = g.unravel(i);
        assert_eq!(g.ravel(&idx[..3]), i);
    }
    let node = CartesianGrid::new(2, 4, 1.0, Centering::Node).unwrap();
    assert_eq!(node.min_radius(), 0.0);
}

#[test]
fn one_dimensional_weights_are_exact_cell_means() {
    let b = 0.5;
    let g = CartesianGrid::cell(1, 64, 4.0).unwrap();
    let w = potential_weights(&g, b, WeightRule::default_for(&g)).unwrap();
    let h = g.spacing();
    for (j, x) in g.axis_coords().into_iter().enumerate() {
        let expected = if x.abs() <= 1.0 {
            // Closed form of the mean of |x|^{-1/2} over [x - h/2, x + h/2].
            let f = |t: f64| 2.0 * t.signum() * t.abs().sqrt();
            (f(x + 0.5 * h) - f(x - 0.5 * h)) / h
        } else {
            x.abs().powf(-b)
        };
        assert!((w[j] - expected).abs() < 1e-13 * expected, "x = {x}");
    }
}

#[test]
fn box_integral_matches_tensor_quadrature_off_the_origin() {
    let b = 0.8;
    let (lo, hi) = ([0.3, -0.2], [0.7, 0.4]);
    let n = 400;
    let mut sum = 0.0;
    for i in 0..n {
        for j in 0..n {
            let x = lo[0] + (i as f64 + 0.5) * (hi[0] - lo[0]) / n as f64;
            let y = lo[1] + (j as f64 + 0.5) * (hi[1] - lo[1]) / n as f64;
            sum += (x * x + y * y).powf(-0.5 * b);
        }
    }
    let midpoint = sum * (hi[0] - lo[0]) * (hi[1] - lo[1]) / (n * n) as f64;
    let exact = weights::box_integral(&lo, &hi, b);
    assert!((exact / midpoint - 1.0).abs() < 1e-5, "{exact} vs {midpoint}");
}

#[test]
fn pointwise_rule_rejects_a_node_at_the_origin() {
    let g = CartesianGrid::new(1, 8, 1.0, Centering::Node).unwrap();
    assert!(matches!(
        potential_weights(&g, 0.5, WeightRule::Pointwise),
        Err(InlsError::SingularWeight(_))
    ));
    assert!(potential_weights(&g, 0.5, WeightRule::default_for(&g)).is_ok());
}
