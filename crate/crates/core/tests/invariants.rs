use std::sync::OnceLock;

use num_complex::Complex64;
use proptest::prelude::*;

use inls_core::evolution::{evolve, EvolutionConfig, Termination};
use inls_core::functionals::{self, random};
use inls_core::ground_state::{shoot, GroundState, ShootOptions};
use inls_core::io::{parse_config, read_snapshot, write_snapshot};
use inls_core::transforms::{phase, s_family, scale, SFamilyParams};
use inls_core::verify::fit_rate;
use inls_core::{CartesianGrid, Centering, Discretization, Field, Params};

fn gs() -> &'static GroundState {
    static GS: OnceLock<GroundState> = OnceLock::new();
    GS.get_or_init(|| shoot(&Params::new(1, 0.5).unwrap(), &ShootOptions::default()).unwrap())
}

fn bump(grid: CartesianGrid, width: f64, shift: f64, k: f64) -> Field {
    Field::from_fn(grid, 0.0, |x| {
        let y = x[0] - shift;
        Complex64::from_polar((-y * y / (2.0 * width * width)).exp(), k * x[0])
    })
    .unwrap()
}

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![
        any::<f64>().prop_filter("finite", |v| v.is_finite()),
        Just(0.0),
        Just(-0.0),
        Just(f64::MIN_POSITIVE / 4.0),
    ]
}

proptest! {
    #[test]
    fn phases_compose(a in -10.0f64..10.0, b in -10.0f64..10.0, w in 0.5f64..2.0) {
        let u = bump(CartesianGrid::cell(1, 64, 8.0).unwrap(), w, 0.3, 1.0);
        let two = phase(&phase(&u, a), b);
        let one = phase(&u, a + b);
        prop_assert!(two.sup_distance(&one).unwrap() < 1e-13);
        prop_assert!((two.l2_norm() / u.l2_norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn scalings_compose_and_keep_mass(a in 0.8f64..1.25, b in 0.8f64..1.25, w in 0.7f64..1.3) {
        let u = bump(CartesianGrid::cell(1, 256, 12.0).unwrap(), w, 0.0, 0.0);
        let two = scale(&scale(&u, a).unwrap(), b).unwrap();
        let one = scale(&u, a * b).unwrap();
        let m = functionals::mass(&u).unwrap();
        let m1 = functionals::mass(&one).unwrap();
        prop_assert!(two.sup_distance(&one).unwrap() < 1e-6, "{}", two.sup_distance(&one).unwrap());
        prop_assert!((m1 / m - 1.0).abs() < 1e-6, "{}", m1 / m - 1.0);
    }

    #[test]
    fn snapshots_round_trip_bit_exactly(
        values in prop::collection::vec((finite(), finite()), 8),
        t in finite(),
        b in 0.01f64..0.99,
        extent in 0.1f64..1e3,
    ) {
        let grid = CartesianGrid::cell(1, 8, extent).unwrap();
        let field = Field::new(grid, t, values.iter().map(|&(re, im)| Complex64::new(re, im)).collect()).unwrap();
        let mut bytes = Vec::new();
        write_snapshot(&mut bytes, &field, b).unwrap();
        let (back, b2) = read_snapshot(bytes.as_slice()).unwrap();
        prop_assert_eq!(b2.to_bits(), b.to_bits());
        prop_assert_eq!(back.time().to_bits(), t.to_bits());
        prop_assert_eq!(back.grid(), field.grid());
        for (x, y) in back.values().iter().zip(field.values()) {
            prop_assert_eq!((x.re.to_bits(), x.im.to_bits()), (y.re.to_bits(), y.im.to_bits()));
        }
        bytes.pop();
        prop_assert!(read_snapshot(bytes.as_slice()).is_err());
    }

    #[test]
    fn config_echo_parses_to_the_same_config(
        half in 4usize..2048,
        extent in 0.5f64..100.0,
        amplitude in -3.0f64..3.0,
        width in 0.1f64..5.0,
        dt0 in 1e-6f64..1e-2,
        steps in 1.0f64..1e4,
        record_every in 1usize..1000,
        seed in any::<u64>(),
        b in 0.01f64..0.99,
    ) {
        let text = format!(
            r#"{{"params": {{"N": 1, "b": {b:?}}}, "grid": {{"M": {}, "L": {extent:?}}},
                "initial_condition": {{"type": "gaussian", "amplitude": {amplitude:?}, "width": {width:?}}},
                "evolution": {{"dt0": {dt0:?}, "t_end": {:?}, "record_every": {record_every}}},
                "seed": {seed}}}"#,
            2 * half,
            dt0 * steps
        );
        let cfg = parse_config(&text).unwrap();
        prop_assert_eq!(cfg.grid.centering, Centering::Cell);
        prop_assert_eq!(parse_config(&cfg.to_json()).unwrap(), cfg);
    }

    #[test]
    fn rate_fit_recovers_synthetic_exponents(alpha in 0.5f64..2.0, t_blowup in 0.6f64..3.0, c in 0.1f64..10.0) {
        let times: Vec<f64> = (0..60).map(|i| t_blowup * (1.0 - 0.9f64.powi(i))).collect();
        let g: Vec<f64> = times.iter().map(|t| c * (t_blowup - t).powf(-alpha)).collect();
        let free = fit_rate(&times, &g, None).unwrap();
        prop_assert!((free.alpha - alpha).abs() < 1e-4 * alpha, "{free:?}");
        let known = fit_rate(&times, &g, Some(t_blowup)).unwrap();
        prop_assert!((known.alpha - alpha).abs() < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn evolution_conserves_mass(seed in any::<u64>(), dt in 1e-4f64..2e-3) {
        let grid = CartesianGrid::cell(1, 128, 15.0).unwrap();
        let disc = Discretization::new(Params::new(1, 0.5).unwrap(), grid).unwrap();
        let raw = random::band_limited(&grid, &random::RandomFieldSpec::default(), &mut random::rng(seed)).unwrap();
        let u0 = random::normalize_to_mass(&raw, 0.5 * gs().mass_sq()).unwrap();
        let mut cfg = EvolutionConfig::new(dt, 40.0 * dt);
        cfg.record_every = 10;
        let traj = evolve(&u0, &cfg, &disc).unwrap();
        prop_assert_eq!(traj.termination, Termination::ReachedTEnd);
        prop_assert!(traj.mass_drift() < 1e-13, "{}", traj.mass_drift());
    }

    #[test]
    fn sub_threshold_fields_satisfy_the_sharp_inequality(seed in any::<u64>()) {
        let grid = CartesianGrid::cell(1, 256, 20.0).unwrap();
        let disc = Discretization::new(Params::new(1, 0.5).unwrap(), grid).unwrap();
        let u = random::band_limited(&grid, &random::RandomFieldSpec::default(), &mut random::rng(seed)).unwrap();
        let j = functionals::weinstein_j(&u, &disc).unwrap();
        prop_assert!(j >= gs().j_min() - 1e-6);
        prop_assert!(functionals::gn_gap(&u, gs().mass_sq(), &disc).unwrap() >= -1e-10);
    }

    #[test]
    fn s_family_carries_the_critical_mass(
        t_blowup in 0.5f64..2.0,
        lambda0 in 0.7f64..1.5,
        gamma0 in -3.0f64..3.0,
        frac in 0.0f64..0.5,
    ) {
        let sp = SFamilyParams::new(t_blowup, lambda0, gamma0).unwrap();
        let grid = CartesianGrid::cell(1, 2048, 20.0).unwrap();
        let u = s_family(&sp, gs(), frac * t_blowup, &grid).unwrap();
        let m = functionals::mass(&u).unwrap();
        let unchirped = gs().sample_scaled(&grid, sp.lambda_at(frac * t_blowup)).unwrap();
        prop_assert!((m / functionals::mass(&unchirped).unwrap() - 1.0).abs() < 1e-13);
        prop_assert!((m / gs().mass_sq() - 1.0).abs() < 1e-3, "{m}");
    }
}
