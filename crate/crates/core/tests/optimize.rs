mod common;

use std::f64::consts::PI;
use std::sync::Arc;

use isoshape::energy::evaluate;
use isoshape::geometry::{make_ball, make_grid, unit_volume_radius, Configuration, EnergyParams};
use isoshape::optimize::{
    asphericity, critical_exponent, gamma_to_mass, initial_configuration, mass_to_gamma, minimize,
    scaling_identity, shape_gradient, sweep_gamma, write_sweep_csv, ConstraintMode, InitSpec,
    OptimizerOptions, Status, SWEEP_CSV_HEADER,
};
use isoshape::Error;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{gradient_error, random_shape};

#[test]
fn ball_gradient_symmetries() {
    let g = Arc::new(make_grid(2, 64).unwrap());
    let cfg = Configuration::single(make_ball(0.8, &[0.0, 0.0], g).unwrap());
    for p in [0.0, 1.0, 2.5] {
        let grad = shape_gradient(&cfg, &EnergyParams::new(2, p, 1.0, 0.0).unwrap()).unwrap();
        let dr = &grad[0].dr;
        assert!(dr.iter().all(|x| (x - dr[0]).abs() < 1e-12 * dr[0].abs()));
        if p == 0.0 {
            assert!(grad[0].dc.iter().all(|x| x.abs() < 1e-12));
        }
    }
}

#[test]
fn gradient_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let g2 = Arc::new(make_grid(2, 32).unwrap());
    let a = random_shape(&g2, &[-0.9, 0.1], 0.5, 0.3, &mut rng);
    let b = random_shape(&g2, &[0.9, -0.2], 0.4, 0.3, &mut rng);
    let cfg = Configuration::new(vec![a, b]).unwrap();
    let params = EnergyParams::new(2, 2.0, 1.0, 3.0).unwrap();
    let err = gradient_error(&cfg, &params);
    assert!(err < 1e-4, "{err}");

    let g3 = Arc::new(make_grid(3, 8).unwrap());
    let s = random_shape(&g3, &[0.1, 0.0, -0.2], 0.6, 0.3, &mut rng);
    let params = EnergyParams::new(3, 1.5, 1.2, 0.7).unwrap();
    let err = gradient_error(&Configuration::single(s), &params);
    assert!(err < 1e-4, "{err}");
}

#[test]
fn ball_is_a_fixed_point() {
    let params = EnergyParams::new(2, 2.0, 1.0, 0.0).unwrap();
    let init = initial_configuration(&InitSpec::Ball, 2, 64, 1.0, 0).unwrap();
    let m = minimize(&init, &params, &OptimizerOptions::default()).unwrap();
    assert_eq!(m.status, Status::Converged);
    let r0 = unit_volume_radius(2);
    assert!(m.config.components()[0].radii().iter().all(|r| (r - r0).abs() < 1e-12));
    assert!((m.record.energy - 2.0 * PI * r0.powi(3)).abs() < 1e-12);
}

#[test]
fn perturbed_ball_relaxes_at_small_gamma() {
    let params = EnergyParams::new(2, 2.0, 1.0, 0.01).unwrap();
    let opts = OptimizerOptions {
        init: InitSpec::PerturbedBall { eps: 0.2, mode: 3 },
        ..Default::default()
    };
    let init = initial_configuration(&opts.init, 2, 128, 1.0, 1).unwrap();
    let m = minimize(&init, &params, &opts).unwrap();
    let ball = Configuration::single(
        make_ball(unit_volume_radius(2), &[0.0, 0.0], init.components()[0].grid().clone()).unwrap(),
    );
    let e_ball = evaluate(&ball, &params).unwrap().total;
    assert!(m.record.asphericity <= 1e-3, "{}", m.record.asphericity);
    assert!((m.record.energy - e_ball).abs() <= 1e-4);
    assert!((m.record.volume - 1.0).abs() < 1e-10);
    assert!(m.objective_history.windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn penalty_mode_ends_at_the_target_volume() {
    let params = EnergyParams::new(2, 1.0, 1.0, 0.05).unwrap();
    let opts = OptimizerOptions {
        init: InitSpec::PerturbedBall { eps: 0.1, mode: 2 },
        constraint: ConstraintMode::Penalty,
        lambda: 50.0,
        max_iter: 300,
        ..Default::default()
    };
    let init = initial_configuration(&opts.init, 2, 64, 1.0, 2).unwrap();
    let m = minimize(&init, &params, &opts).unwrap();
    assert!((m.record.volume - 1.0).abs() < 1e-10);
    assert!(m.record.energy < evaluate(&init, &params).unwrap().total);
}

#[test]
fn two_balls_beat_one_at_large_gamma() {
    let params = EnergyParams::new(2, 2.0, 1.0, 100.0).unwrap();
    let opts = OptimizerOptions::default();
    let one = initial_configuration(&InitSpec::Ball, 2, 128, 1.0, 0).unwrap();
    let two = initial_configuration(&InitSpec::Multiball { count: 2, spacing: 1.0 }, 2, 128, 1.0, 0).unwrap();
    let e_one = minimize(&one, &params, &opts).unwrap().record.energy;
    let m = minimize(&two, &params, &opts).unwrap();
    assert_eq!(m.record.n_components, 2);
    assert!(m.record.energy < e_one);
}

#[test]
fn minimize_rejects_bad_initial_volume() {
    let params = EnergyParams::new(2, 2.0, 1.0, 0.1).unwrap();
    let init = initial_configuration(&InitSpec::Ball, 2, 32, 3.0, 0).unwrap();
    let err = minimize(&init, &params, &OptimizerOptions::default()).unwrap_err();
    assert!(matches!(err, Error::InvalidParameter { name: "volume", .. }));
}

#[test]
fn mass_correspondence_examples() {
    let p3 = EnergyParams::new(2, 3.0, 1.0, 0.25).unwrap();
    assert!((gamma_to_mass(0.25, &p3).unwrap() - 16.0).abs() < 1e-12);
    let p1 = EnergyParams::new(2, 1.0, 1.0, 0.5).unwrap();
    assert!((gamma_to_mass(0.5, &p1).unwrap() - 0.25).abs() < 1e-12);
    assert_eq!(critical_exponent(3, 1.0), 3.0);
    assert_eq!(critical_exponent(2, 0.5), 2.5);
    assert!((critical_exponent(2, 2.0 - 1e-12) - 1.0).abs() < 1e-11);
    let pc = EnergyParams::new(2, 2.0, 1.0, 1.0).unwrap();
    assert!(matches!(gamma_to_mass(1.0, &pc), Err(Error::CriticalExponent { .. })));
}

#[test]
fn sweep_validates_its_grid() {
    let params = EnergyParams::new(2, 2.0, 1.0, 0.0).unwrap();
    let opts = OptimizerOptions::default();
    assert!(sweep_gamma(&[], &params, 32, &opts).is_err());
    assert!(sweep_gamma(&[0.1, 0.1], &params, 32, &opts).is_err());
    assert!(sweep_gamma(&[0.0, 0.1], &params, 32, &opts).is_err());
}

#[test]
fn sweep_is_reproducible_and_serializes() {
    let params = EnergyParams::new(2, 2.0, 1.0, 0.0).unwrap();
    let opts = OptimizerOptions {
        init: InitSpec::PerturbedBall { eps: 0.1, mode: 2 },
        seed: 9,
        ..Default::default()
    };
    let gammas = [0.01, 0.1, 1.0];
    let csv = |runs: &[isoshape::optimize::Minimization]| {
        let records: Vec<_> = runs.iter().map(|m| m.record.clone()).collect();
        let mut out = Vec::new();
        write_sweep_csv(&records, &mut out).unwrap();
        String::from_utf8(out).unwrap()
    };
    let a = csv(&sweep_gamma(&gammas, &params, 64, &opts).unwrap());
    let b = csv(&sweep_gamma(&gammas, &params, 64, &opts).unwrap());
    assert_eq!(a, b);
    let mut lines = a.lines();
    assert_eq!(lines.next(), Some(SWEEP_CSV_HEADER));
    assert_eq!(lines.count(), 3);
}

#[test]
fn asphericity_vanishes_only_for_the_centered_ball() {
    let g = Arc::new(make_grid(2, 64).unwrap());
    let ball = Configuration::single(make_ball(0.5, &[0.0, 0.0], g.clone()).unwrap());
    assert!(asphericity(&ball).unwrap() < 1e-14);
    let off = Configuration::single(make_ball(0.5, &[0.1, 0.0], g).unwrap());
    assert!(asphericity(&off).unwrap() > 1e-2);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mass_map_round_trips(
        p in 0.0f64..4.0,
        alpha in 0.1f64..1.9,
        gamma in 1e-3f64..1e3,
    ) {
        let params = EnergyParams::new(2, p, alpha, gamma).unwrap();
        prop_assume!((p - critical_exponent(2, alpha)).abs() > 0.05);
        let back = mass_to_gamma(gamma_to_mass(gamma, &params).unwrap(), &params).unwrap();
        prop_assert!((back / gamma - 1.0).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn scaling_identity_holds(
        seed in 0u64..1000,
        p in prop::sample::select(vec![0.5, 1.0, 3.0]),
        alpha in prop::sample::select(vec![0.5, 1.0]),
        gamma in 0.05f64..5.0,
    ) {
        let g = Arc::new(make_grid(2, 64).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = random_shape(&g, &[0.1, -0.1], 0.5, 0.3, &mut rng);
        let s = s.dilate(s.volume().powf(-0.5)).unwrap();
        let params = EnergyParams::new(2, p, alpha, gamma).unwrap();
        let id = scaling_identity(&Configuration::single(s), &params).unwrap();
        prop_assert!(id.residual < 1e-6, "{:?}", id);
    }
}
