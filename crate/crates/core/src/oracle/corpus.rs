//! Randomized corpora for the oracle checks and the report format of the
//! verification run.

use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::checks::{check_en_lower_bound, check_rel_isop, reaches_annulus, check_v_lipschitz, en_lower_bound_limit, quasi_minimality, weighted_density};
use super::mc::mc_riesz;
use super::raster::{raster_measures, rasterize_shape, Bounds, RasterSet};
use crate::energy::{riesz_self, weighted_perimeter};
use crate::geometry::{make_grid, Configuration, EnergyParams, SphereGrid, StarShape};
use crate::optimize::{initial_configuration, minimize, InitSpec, OptimizerOptions};
use crate::Result;

/// Outcome of one corpus check. `margin ≥ 0` means the trial passed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub trials: usize,
    pub violations: usize,
    pub worst_margin: f64,
    pub params: serde_json::Value,
}

impl CheckReport {
    fn from_margins(check: &str, margins: &[f64], params: serde_json::Value) -> Self {
        CheckReport {
            check: check.to_string(),
            trials: margins.len(),
            violations: margins.iter().filter(|m| !(**m >= 0.0)).count(),
            worst_margin: margins.iter().copied().fold(f64::INFINITY, f64::min),
            params,
        }
    }
}

/// Sizes of the randomized corpora.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorpusOptions {
    pub seed: u64,
    /// Blobs for the relative isoperimetric fit.
    pub blobs: usize,
    /// Raster spacing of the annulus corpus.
    pub annulus_h: f64,
    /// Raster pairs for the Lipschitz bound.
    pub lipschitz_pairs: usize,
    pub lipschitz_h: f64,
    /// Shapes compared between raster and quadrature.
    pub agreement_shapes: usize,
    pub agreement_h: f64,
    /// Shapes compared between Monte Carlo and quadrature.
    pub mc_shapes: usize,
    pub mc_samples: usize,
}

impl Default for CorpusOptions {
    fn default() -> Self {
        CorpusOptions {
            seed: 0,
            blobs: 50,
            annulus_h: 1.0 / 32.0,
            lipschitz_pairs: 100,
            lipschitz_h: 1.0 / 128.0,
            agreement_shapes: 20,
            agreement_h: 1.0 / 512.0,
            mc_shapes: 6,
            mc_samples: 1_000_000,
        }
    }
}

/// Random smooth planar star shape `r = s·exp(Σ_{k≤4} a_k cos(kθ + φ_k))`.
pub fn random_blob(grid: &Arc<SphereGrid>, center: [f64; 2], scale: f64, rng: &mut ChaCha8Rng) -> Result<StarShape> {
    let modes: Vec<(f64, f64)> = (1..=4)
        .map(|k| (rng.gen_range(-0.25..0.25) / k as f64, rng.gen_range(0.0..TAU)))
        .collect();
    let radii = grid
        .nodes()
        .iter()
        .map(|t| {
            let th = t[1].atan2(t[0]);
            let s: f64 = modes.iter().enumerate().map(|(k, (a, ph))| a * ((k + 1) as f64 * th + ph).cos()).sum();
            scale * s.exp()
        })
        .collect();
    StarShape::new(grid.clone(), &center, radii)
}

fn blob_grid() -> Result<Arc<SphereGrid>> {
    Ok(Arc::new(make_grid(2, 128)?))
}

/// Fitted `c_d` (largest `lhs/per` over the corpus) on annuli `j = 0..=3`,
/// with the corpus dilated by `2^j` for annulus `j`; passes when
/// `max/min − 1 ≤ 10%`. Blobs whose raster misses an annulus are skipped
/// for it; degenerate trials count as violations.
pub fn rel_isop_corpus(opts: &CorpusOptions) -> Result<(CheckReport, [f64; 4])> {
    let grid = blob_grid()?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x15_0b);
    let blobs: Vec<StarShape> = (0..opts.blobs)
        .map(|_| {
            let rad = rng.gen_range(0.0..1.8);
            let ang = rng.gen_range(0.0..TAU);
            let scale = rng.gen_range(0.4..1.2);
            random_blob(&grid, [rad * ang.cos(), rad * ang.sin()], scale, &mut rng)
        })
        .collect::<Result<_>>()?;
    let mut fitted = [0.0; 4];
    let mut degenerate = 0;
    let mut skipped = 0;
    for (j, c) in fitted.iter_mut().enumerate() {
        let s = 2f64.powi(j as i32);
        let ratios: Vec<Option<Result<f64>>> = blobs
            .par_iter()
            .map(|b| {
                let rs = b.dilate(s).and_then(|big| rasterize_shape(&big, opts.annulus_h));
                match rs {
                    Ok(rs) if !reaches_annulus(&rs, j as i32) => None,
                    Ok(rs) => Some(check_rel_isop(&rs, j as i32).map(|r| r.ratio)),
                    Err(e) => Some(Err(e)),
                }
            })
            .collect();
        skipped += ratios.iter().filter(|r| r.is_none()).count();
        degenerate += ratios.iter().flatten().filter(|r| r.is_err()).count();
        *c = ratios.iter().flatten().flatten().copied().fold(0.0, f64::max);
    }
    let max = fitted.iter().copied().fold(0.0, f64::max);
    let min = fitted.iter().copied().fold(f64::INFINITY, f64::min);
    let spread = max / min - 1.0;
    let mut report = CheckReport::from_margins(
        "rel_isop_scale_invariance",
        &[0.10 - spread],
        json!({"blobs": opts.blobs, "h": opts.annulus_h, "fitted_c": fitted, "skipped": skipped, "seed": opts.seed}),
    );
    report.trials = opts.blobs * 4 - skipped;
    report.violations += degenerate;
    Ok((report, fitted))
}

/// A raster of mass at most one built from a random blob, with a smaller
/// perturbed companion.
fn lipschitz_pair(grid: &Arc<SphereGrid>, h: f64, rng: &mut ChaCha8Rng) -> Result<(RasterSet, RasterSet)> {
    let e = random_blob(grid, [rng.gen_range(-0.2..0.2), rng.gen_range(-0.2..0.2)], 0.5, rng)?;
    let e = e.dilate((0.95 / e.volume()).sqrt())?;
    let bump_at = rng.gen_range(0.0..TAU);
    let bump = rng.gen_range(-0.3..0.3);
    let width = rng.gen_range(0.2..0.8);
    let radii = grid
        .nodes()
        .iter()
        .zip(e.radii())
        .map(|(t, r)| {
            let dt = (t[1].atan2(t[0]) - bump_at + PI).rem_euclid(TAU) - PI;
            r * (1.0 + bump * (-(dt / width).powi(2)).exp())
        })
        .collect();
    let shift = [rng.gen_range(-0.1..0.1), rng.gen_range(-0.1..0.1)];
    let f = StarShape::new(grid.clone(), &[e.center()[0] + shift[0], e.center()[1] + shift[1]], radii)?;
    let f = f.dilate((0.95 / f.volume()).sqrt().min(1.0))?;
    Ok((rasterize_shape(&e, h)?, rasterize_shape(&f, h)?))
}

pub fn lipschitz_corpus(opts: &CorpusOptions, alpha: f64) -> Result<CheckReport> {
    let grid = blob_grid()?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x11b);
    let mut margins = Vec::with_capacity(opts.lipschitz_pairs);
    for t in 0..opts.lipschitz_pairs {
        let (e, f) = lipschitz_pair(&grid, opts.lipschitz_h, &mut rng)?;
        let c = check_v_lipschitz(&e, &f, alpha, opts.mc_samples, opts.seed.wrapping_add(t as u64))?;
        margins.push(c.margin());
    }
    Ok(CheckReport::from_margins(
        "v_lipschitz",
        &margins,
        json!({"pairs": opts.lipschitz_pairs, "alpha": alpha, "h": opts.lipschitz_h, "samples": opts.mc_samples, "sigma": 3}),
    ))
}

/// Raster volume within 1% and weighted perimeter within 2% of quadrature.
pub fn raster_agreement_corpus(opts: &CorpusOptions, p: f64) -> Result<CheckReport> {
    let grid = blob_grid()?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0xa9);
    let shapes: Vec<StarShape> = (0..opts.agreement_shapes)
        .map(|_| {
            let c = [rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)];
            let s = rng.gen_range(0.5..1.0);
            random_blob(&grid, c, s, &mut rng)
        })
        .collect::<Result<_>>()?;
    let margins: Vec<f64> = shapes
        .par_iter()
        .map(|s| -> Result<f64> {
            let m = raster_measures(&rasterize_shape(s, opts.agreement_h)?, p);
            let wp = weighted_perimeter(s, p);
            let dv = (m.volume - s.volume()).abs() / s.volume();
            let dp = (m.weighted_perimeter - wp).abs() / wp;
            Ok((0.01 - dv).min(0.02 - dp))
        })
        .collect::<Result<_>>()?;
    Ok(CheckReport::from_margins(
        "raster_quadrature_agreement",
        &margins,
        json!({"shapes": opts.agreement_shapes, "h": opts.agreement_h, "p": p, "volume_tol": 0.01, "perimeter_tol": 0.02}),
    ))
}

/// `riesz_self` against `mc_riesz` within `3σ` (plus the quadrature's own
/// error estimate).
pub fn mc_agreement_corpus(opts: &CorpusOptions, alpha: f64) -> Result<CheckReport> {
    let grid = blob_grid()?;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x3c);
    let mut margins = Vec::with_capacity(opts.mc_shapes);
    for t in 0..opts.mc_shapes {
        let s = random_blob(&grid, [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)], rng.gen_range(0.5..1.0), &mut rng)?;
        let q = riesz_self(&s, alpha)?;
        let mc = mc_riesz(&s, None, alpha, opts.mc_samples, opts.seed.wrapping_add(t as u64))?;
        margins.push(3.0 * mc.std_error + q.error.unwrap_or(0.0).abs() - (mc.estimate - q.value).abs());
    }
    Ok(CheckReport::from_margins(
        "mc_quadrature_agreement",
        &margins,
        json!({"shapes": opts.mc_shapes, "alpha": alpha, "samples": opts.mc_samples, "sigma": 3}),
    ))
}

/// Ratio within 2% of one at `m = 1e-4` and extrapolation residual ≤ 2%.
pub fn en_lower_bound_report(p: f64, d: usize) -> Result<CheckReport> {
    let m = 1e-4;
    let c = check_en_lower_bound(m, p, d)?;
    let mut margins = vec![0.02 - (c.ratio - 1.0).abs()];
    let mut params = json!({"m": m, "p": p, "d": d, "ratio": c.ratio, "remainder_order": c.remainder_order});
    if p > 1.0 {
        let (limit, residual) = en_lower_bound_limit(m, p, d)?;
        margins.push(0.02 - residual);
        params["limit"] = json!(limit);
        params["residual"] = json!(residual);
    }
    Ok(CheckReport::from_margins("en_lower_bound", &margins, params))
}

fn small_gamma_minimizer(seed: u64) -> Result<(Configuration, EnergyParams)> {
    let params = EnergyParams::new(2, 2.0, 1.0, 0.01)?;
    let opts = OptimizerOptions {
        init: InitSpec::PerturbedBall { eps: 0.2, mode: 3 },
        seed,
        ..Default::default()
    };
    let init = initial_configuration(&opts.init, 2, 128, 1.0, seed)?;
    Ok((minimize(&init, &params, &opts)?.config, params))
}

/// Hand-built competitors of a computed minimizer at `γ = 0.01`: local bumps
/// and dents rescaled to unit volume, and small translations.
pub fn quasi_minimality_diagnostic(opts: &CorpusOptions) -> Result<CheckReport> {
    let (min, params) = small_gamma_minimizer(opts.seed)?;
    let shape = &min.components()[0];
    let grid = shape.grid().clone();
    let mut competitors = Vec::new();
    for &(amp, width) in &[(0.05, 0.2), (-0.05, 0.2), (0.1, 0.5), (-0.1, 0.5), (0.2, 0.1)] {
        let radii: Vec<f64> = grid
            .nodes()
            .iter()
            .zip(shape.radii())
            .map(|(t, r)| {
                let dt = (t[1].atan2(t[0]) + PI).rem_euclid(TAU) - PI;
                r * (1.0 + amp * (-(dt / width).powi(2)).exp())
            })
            .collect();
        let f = StarShape::new(grid.clone(), shape.center(), radii)?;
        let t = (1.0 / f.volume()).sqrt();
        let c = shape.center();
        competitors.push(f.dilate(t)?.translate(&[c[0] * (1.0 - t), c[1] * (1.0 - t)]));
    }
    for off in [[0.02, 0.0], [0.0, -0.05]] {
        competitors.push(shape.translate(&off));
    }
    let h = 1.0 / 512.0;
    let margins: Vec<f64> = competitors
        .par_iter()
        .map(|f| quasi_minimality(&min, &Configuration::single(f.clone()), &params, h).map(|q| q.margin))
        .collect::<Result<_>>()?;
    Ok(CheckReport::from_margins(
        "quasi_minimality",
        &margins,
        json!({"gamma": params.gamma, "p": params.p, "alpha": params.alpha, "competitors": margins.len(), "h": h}),
    ))
}

/// Weighted relative density at boundary points of a computed minimizer at
/// `γ = 0.01`, for `r` down to `1/32`; each value must be positive.
pub fn density_diagnostic(opts: &CorpusOptions) -> Result<CheckReport> {
    let (min, params) = small_gamma_minimizer(opts.seed)?;
    let shape = &min.components()[0];
    let c = shape.center();
    let h = 1.0 / 512.0;
    let reach = 1.1 * shape.max_radius() + 0.3;
    let rs = RasterSet::from_predicate(h, Bounds::square([c[0], c[1]], reach), |x, y| min.contains([x, y, 0.0]))?;
    let radii = [0.25, 0.125, 0.0625, 0.03125];
    let n = shape.grid().len();
    let mut margins = Vec::new();
    for k in (0..n).step_by(n / 16) {
        let x = shape.boundary_point(k);
        for &r in &radii {
            margins.push(weighted_density(&rs, [x[0], x[1]], r, params.p)?);
        }
    }
    Ok(CheckReport::from_margins(
        "weighted_density_positive",
        &margins,
        json!({"gamma": params.gamma, "p": params.p, "radii": radii, "points": 16, "h": h}),
    ))
}

/// Runs every corpus: the relative isoperimetric fit, the Lipschitz bound,
/// raster and Monte Carlo agreement, the small-mass expansion, and the
/// quasi-minimality and density diagnostics.
pub fn verify(opts: &CorpusOptions) -> Result<Vec<CheckReport>> {
    let (isop, _) = rel_isop_corpus(opts)?;
    Ok(vec![
        isop,
        lipschitz_corpus(opts, 1.0)?,
        raster_agreement_corpus(opts, 2.0)?,
        mc_agreement_corpus(opts, 1.0)?,
        en_lower_bound_report(2.0, 2)?,
        quasi_minimality_diagnostic(opts)?,
        density_diagnostic(opts)?,
    ])
}

pub fn total_violations(reports: &[CheckReport]) -> usize {
    reports.iter().map(|r| r.violations).sum()
}
