use std::f64::consts::PI;
use std::sync::Arc;

use isoshape::energy::weighted_perimeter;
use isoshape::geometry::{make_ball, make_grid, Configuration, StarShape};
use isoshape::oracle::{
    check_en_lower_bound, check_rel_isop, check_v_lipschitz, en_lower_bound_limit,
    lipschitz_constant, mc_riesz, raster_measures, rasterize, rasterize_shape, total_violations,
    verify, weighted_density, Bounds, CorpusOptions, RasterSet,
};
use isoshape::Error;

fn disk(r: f64, c: [f64; 2], n: usize) -> StarShape {
    make_ball(r, &c, Arc::new(make_grid(2, n).unwrap())).unwrap()
}

#[test]
fn raster_ball_volume() {
    let a = rasterize_shape(&disk(1.0, [0.0, 0.0], 128), 1.0 / 256.0).unwrap();
    assert!((a.volume() / PI - 1.0).abs() < 0.01);
    let b = rasterize_shape(&disk(1.0, [0.3, 0.3], 128), 1.0 / 256.0).unwrap();
    assert!((b.volume() / PI - 1.0).abs() < 0.01);
}

#[test]
fn raster_rejects_tiny_sets() {
    let err = rasterize_shape(&disk(0.01, [0.0, 0.0], 64), 1.0 / 64.0).unwrap_err();
    assert!(matches!(err, Error::ResolutionTooCoarse { .. }));
}

#[test]
fn raster_square_is_exact() {
    let rs = RasterSet::from_predicate(1.0 / 64.0, Bounds::square([0.5, 0.5], 1.0), |x, y| {
        (0.0..1.0).contains(&x) && (0.0..1.0).contains(&y)
    })
    .unwrap();
    assert_eq!(rs.volume(), 1.0);
}

#[test]
fn raster_ball_perimeters() {
    let rs = rasterize_shape(&disk(1.0, [0.0, 0.0], 256), 1.0 / 512.0).unwrap();
    let m0 = raster_measures(&rs, 0.0);
    assert!((m0.perimeter / (2.0 * PI) - 1.0).abs() < 0.015);
    let m2 = raster_measures(&rs, 2.0);
    assert!((m2.weighted_perimeter / (2.0 * PI) - 1.0).abs() < 0.02);
}

#[test]
fn raster_and_quadrature_perimeters_agree() {
    let g = Arc::new(make_grid(2, 256).unwrap());
    let r = g.nodes().iter().map(|x| 1.0 + 0.3 * (2.0 * x[1].atan2(x[0])).cos()).collect();
    let s = StarShape::new(g, &[0.0, 0.0], r).unwrap();
    let rs = rasterize_shape(&s, 1.0 / 512.0).unwrap();
    let raster = raster_measures(&rs, 2.0).weighted_perimeter;
    let quad = weighted_perimeter(&s, 2.0);
    assert!((raster / quad - 1.0).abs() < 0.01, "{raster} vs {quad}");
}

#[test]
fn mc_homogeneity_of_the_disk() {
    let b1 = disk(1.0, [0.0, 0.0], 128);
    let b2 = disk(2.0, [0.0, 0.0], 128);
    let v1 = mc_riesz(&b1, None, 1.0, 2_000_000, 1).unwrap();
    let v2 = mc_riesz(&b2, None, 1.0, 2_000_000, 2).unwrap();
    let ratio = v2.estimate / v1.estimate;
    let sigma = ratio * ((v1.std_error / v1.estimate).powi(2) + (v2.std_error / v2.estimate).powi(2)).sqrt();
    assert!((ratio - 8.0).abs() < 3.0 * sigma, "{ratio} ± {sigma}");
}

#[test]
fn mc_far_cross_term() {
    let a = disk(1.0, [0.0, 0.0], 128);
    let b = disk(1.0, [50.0, 0.0], 128);
    for alpha in [0.5, 1.0] {
        let mc = mc_riesz(&a, Some(&b), alpha, 1_000_000, 3).unwrap();
        let leading = PI * PI / 50f64.powf(alpha);
        // The next term of the multipole expansion is below 1e-3 relative here.
        assert!((mc.estimate - leading).abs() < 3.0 * mc.std_error + 1e-3 * leading, "{mc:?} vs {leading}");
    }
}

#[test]
fn mc_is_seeded() {
    let a = disk(0.7, [0.1, 0.0], 64);
    let x = mc_riesz(&a, None, 1.2, 1_000_000, 42).unwrap();
    let y = mc_riesz(&a, None, 1.2, 1_000_000, 42).unwrap();
    assert_eq!(x, y);
    assert!(mc_riesz(&a, None, 1.2, 1000, 42).is_err());
}

fn half_plane(h: f64, angle: f64) -> RasterSet {
    let (s, c) = angle.sin_cos();
    RasterSet::from_predicate(h, Bounds::square([0.0, 0.0], 2.5), |x, y| -s * x + c * y < 0.0).unwrap()
}

#[test]
fn half_plane_in_the_first_annulus() {
    let lhs = (1.5 * PI).sqrt();
    // The calibrated four-direction estimator reads straight edges within
    // [0.948, 1.026] of their length depending on orientation; axis-aligned
    // edges read lowest.
    for angle in [0.0, 0.4, 1.0] {
        let r = check_rel_isop(&half_plane(1.0 / 256.0, angle), 0).unwrap();
        assert!((r.lhs / lhs - 1.0).abs() < 0.01, "{r:?}");
        assert!((0.94..1.03).contains(&(r.per / 2.0)), "{r:?}");
        assert!((r.ratio / (lhs / 2.0) - 1.0).abs() < 0.06, "{r:?}");
    }
}

#[test]
fn set_containing_the_annulus() {
    let rs = RasterSet::from_predicate(1.0 / 64.0, Bounds::square([0.0, 0.0], 2.5), |x, y| x.hypot(y) < 2.2).unwrap();
    let r = check_rel_isop(&rs, 0).unwrap();
    assert_eq!(r.lhs, 0.0);
    assert_eq!(r.ratio, 0.0);
}

#[test]
fn lipschitz_bound() {
    assert!((lipschitz_constant(2, 1.0) - (4.0 * PI + 2.0)).abs() < 1e-12);
    let r = (0.95 / PI).sqrt();
    let e = rasterize_shape(&disk(r, [0.0, 0.0], 128), 1.0 / 128.0).unwrap();
    let same = check_v_lipschitz(&e, &e, 1.0, 1_000_000, 0).unwrap();
    assert_eq!((same.lhs, same.symmetric_difference), (0.0, 0.0));
    assert!(same.margin() >= 0.0);
    let f = rasterize_shape(&disk(r, [0.2, 0.0], 128), 1.0 / 128.0).unwrap();
    let c = check_v_lipschitz(&e, &f, 1.0, 1_000_000, 0).unwrap();
    assert!(c.symmetric_difference > 0.0 && c.margin() >= 0.0);
    let big = rasterize_shape(&disk(0.6, [0.0, 0.0], 128), 1.0 / 128.0).unwrap();
    assert!(matches!(
        check_v_lipschitz(&e, &big, 1.0, 1_000_000, 0),
        Err(Error::MassPreconditionViolated { .. })
    ));
}

#[test]
fn weighted_density_examples() {
    let rs = RasterSet::from_predicate(1.0 / 512.0, Bounds::square([3.0, 0.0], 1.0), |x, _| x < 3.0).unwrap();
    assert_eq!(weighted_density(&rs, [2.5, 0.0], 0.2, 2.0).unwrap(), 0.0);
    let h = weighted_density(&rs, [3.0, 0.0], 0.05, 2.0).unwrap();
    assert!((h - 0.5).abs() < 0.02, "{h}");
    assert!(matches!(
        weighted_density(&rs, [3.9, 0.0], 0.5, 2.0),
        Err(Error::OutOfBounds { .. })
    ));
}

#[test]
fn small_mass_expansion() {
    let zero = check_en_lower_bound(0.0, 2.0, 2).unwrap();
    assert_eq!(zero.exact_lhs, 0.0);
    let c = check_en_lower_bound(1e-4, 2.0, 2).unwrap();
    assert!((c.ratio - 1.0).abs() < 0.02, "{c:?}");
    let r0 = (1.0 / PI).sqrt();
    let rho = (1e-4 / PI).sqrt();
    let big = (r0 * r0 + rho * rho).sqrt();
    let closed = 2.0 * PI * (big.powi(3) + rho.powi(3) - r0.powi(3));
    assert!((c.exact_lhs - closed).abs() < 1e-15);
    let (limit, residual) = en_lower_bound_limit(1e-4, 2.0, 2).unwrap();
    assert!((limit - 1.0).abs() < 0.02 && residual < 0.02);
    assert!(check_en_lower_bound(0.5, 2.0, 2).is_err());
}

#[test]
fn raster_of_a_configuration() {
    let g = Arc::new(make_grid(2, 64).unwrap());
    let a = make_ball(0.4, &[-1.0, 0.0], g.clone()).unwrap();
    let b = make_ball(0.3, &[1.0, 0.5], g).unwrap();
    let cfg = Configuration::new(vec![a, b]).unwrap();
    let rs = rasterize(&cfg, 1.0 / 256.0).unwrap();
    assert!((rs.volume() / (PI * 0.25) - 1.0).abs() < 0.01);
    assert!(rs.contains_point([-1.0, 0.0]) && rs.contains_point([1.0, 0.5]));
    assert!(!rs.contains_point([0.0, 0.0]));
}

#[test]
fn small_corpus_has_no_violations() {
    let opts = CorpusOptions {
        blobs: 8,
        lipschitz_pairs: 4,
        agreement_shapes: 3,
        agreement_h: 1.0 / 256.0,
        mc_shapes: 2,
        ..Default::default()
    };
    let reports = verify(&opts).unwrap();
    assert_eq!(total_violations(&reports), 0, "{reports:#?}");
    let again = verify(&opts).unwrap();
    assert_eq!(serde_json::to_string(&reports).unwrap(), serde_json::to_string(&again).unwrap());
}
