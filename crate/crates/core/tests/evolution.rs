use num_complex::Complex64;

use inls_core::evolution::{evolve, step, EvolutionConfig, Termination};
use inls_core::functionals;
use inls_core::ground_state::{shoot, ShootOptions};
use inls_core::transforms::{s_family, SFamilyParams};
use inls_core::{CartesianGrid, Discretization, Field, Params};

fn disc(m: usize, l: f64) -> Discretization {
    Discretization::new(Params::new(1, 0.5).unwrap(), CartesianGrid::cell(1, m, l).unwrap()).unwrap()
}

#[test]
fn small_data_follow_the_free_schrodinger_flow() {
    // i u_t + u_xx = 0 spreads exp(-x^2/(2 w^2)) into
    // (w^2/(w^2 + 2it))^{1/2} exp(-x^2/(2(w^2 + 2it))).
    let d = disc(512, 30.0);
    let (a, w, t) = (1e-4, 1.0, 1.0);
    let u0 = Field::gaussian(*d.grid(), a, w).unwrap();
    let mut cfg = EvolutionConfig::new(0.01, t);
    cfg.record_every = usize::MAX;
    let traj = evolve(&u0, &cfg, &d).unwrap();
    let s2 = Complex64::new(w * w, 2.0 * t);
    let exact = Field::from_fn(*d.grid(), t, |x| a * (w * w / s2).sqrt() * (-x[0] * x[0] / (2.0 * s2)).exp()).unwrap();
    let err = traj.final_state.l2_distance(&exact).unwrap() / exact.l2_norm();
    assert!(err < 1e-9, "{err}");
}

#[test]
fn snapshots_land_on_requested_times() {
    let d = disc(128, 10.0);
    let u0 = Field::gaussian(*d.grid(), 0.5, 1.0).unwrap();
    let mut cfg = EvolutionConfig::new(0.003, 0.1);
    cfg.snapshot_times = vec![0.01, 0.05, 0.0775];
    let traj = evolve(&u0, &cfg, &d).unwrap();
    let times: Vec<f64> = traj.snapshots.iter().map(Field::time).collect();
    assert_eq!(times.len(), 3);
    for (t, want) in times.iter().zip(&cfg.snapshot_times) {
        assert!((t - want).abs() < 1e-14, "{t} vs {want}");
    }
    assert!((traj.final_state.time() - 0.1).abs() < 1e-14);
    assert_eq!(traj.termination, Termination::ReachedTEnd);
}

#[test]
fn s_family_data_trigger_blowup_detection() {
    let params = Params::new(1, 0.5).unwrap();
    let gs = shoot(&params, &ShootOptions::default()).unwrap();
    let d = disc(4096, 8.0);
    let sp = SFamilyParams::new(0.5, 1.0, 0.0).unwrap();
    let u0 = s_family(&sp, &gs, 0.0, d.grid()).unwrap();
    let g0 = functionals::grad_norm_sq(&u0, &d).unwrap().sqrt();
    let mut cfg = EvolutionConfig::new(4e-6, 0.5);
    cfg.grad_blowup_threshold = Some(2.0 * g0);
    cfg.record_every = 1000;
    let traj = evolve(&u0, &cfg, &d).unwrap();
    assert_eq!(traj.termination, Termination::BlowupDetected);
    // The chirp adds a constant to ||grad S(t)||^2, so locate the crossing
    // on the sampled closed form.
    let grad = |t: f64| functionals::grad_norm_sq(&s_family(&sp, &gs, t, d.grid()).unwrap(), &d).unwrap().sqrt();
    let (mut lo, mut hi) = (0.0, 0.45);
    for _ in 0..50 {
        let mid = 0.5 * (lo + hi);
        if grad(mid) < 2.0 * g0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t = traj.final_state.time();
    assert!((t - lo).abs() < 2e-3, "{t} vs {lo}");
}

#[test]
fn strict_boundary_stops_a_packet_leaving_the_box() {
    let d = disc(256, 10.0);
    let u0 = Field::from_fn(*d.grid(), 0.0, |x| {
        Complex64::from_polar(0.3 * (-(x[0] - 5.0).powi(2)).exp(), 4.0 * x[0])
    })
    .unwrap();
    let mut cfg = EvolutionConfig::new(1e-3, 2.0);
    cfg.strict_boundary = true;
    let traj = evolve(&u0, &cfg, &d).unwrap();
    assert_eq!(traj.termination, Termination::BoundaryContaminated);
    assert!(traj.final_state.time() < 1.0);
}

#[test]
fn invalid_steps_are_rejected() {
    let d = disc(64, 5.0);
    let u0 = Field::gaussian(*d.grid(), 0.5, 1.0).unwrap();
    assert!(step(&u0, 0.0, &d).is_err());
    assert!(evolve(&u0, &EvolutionConfig::new(-1.0, 1.0), &d).is_err());
    assert!(evolve(&u0, &EvolutionConfig::new(0.1, f64::NAN), &d).is_err());
    let other = Field::gaussian(CartesianGrid::cell(1, 32, 5.0).unwrap(), 0.5, 1.0).unwrap();
    assert!(step(&other, 0.01, &d).is_err());
}

#[test]
fn strang_splitting_is_second_order() {
    // Step sizes stay below the 0.9 h^2 / pi accuracy bound.
    let d = disc(256, 15.0);
    let u0 = Field::gaussian(*d.grid(), 1.0, 1.0).unwrap();
    let run = |dt: f64, n: usize| {
        let mut u = u0.clone();
        for _ in 0..n {
            u = step(&u, dt, &d).unwrap();
        }
        u
    };
    let reference = run(1e-4, 320);
    let e1 = run(3.2e-3, 10).l2_distance(&reference).unwrap();
    let e2 = run(1.6e-3, 20).l2_distance(&reference).unwrap();
    let ratio = e1 / e2;
    assert!((ratio - 4.0).abs() < 0.6, "{ratio} ({e1}, {e2})");
}
