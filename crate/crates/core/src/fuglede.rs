//! Second-order stability of nearly spherical sets.
//!
//! A nearly spherical set is `r(θ) = R(1 + u(θ))` with `u` small and zero-mean.
//! The perimeter deficit against the comparison ball splits exactly as
//! `R^{d-1}(I₁ + I₂)`: `I₁` collects the gradient (area-element) excess and
//! `I₂` the density/volume excess. The Riesz deficit has the opposite sign
//! because the ball maximizes the Riesz energy at fixed volume. Comparing
//! the two at a given `γ` decides whether the ball beats the perturbed shape.

use std::io::Write;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::energy::riesz_self;
use crate::energy::sum::neumaier;
use crate::energy::weighted_perimeter;
use crate::geometry::{
    ball_radius_for_volume, make_ball, make_grid, vec3, SphereGrid, StarShape, Vec3,
};
use crate::{Error, Result};

/// Graph condition used by the stability argument: `1 + u ≥ 1/2`.
pub const GRAPH_FLOOR: f64 = 0.5;

/// Relative tolerance of the zero-mean constraint, in units of `dω_d`.
pub const MEAN_TOLERANCE: f64 = 1e-10;

/// A zero-mean radial perturbation `u` of the ball `B_R`, paired with the
/// density exponent `p` of `a(x) = |x|^p`.
#[derive(Clone, Debug)]
pub struct Perturbation {
    grid: Arc<SphereGrid>,
    values: Vec<f64>,
    radius: f64,
    p: f64,
}

impl Perturbation {
    /// Validates `|∫u| ≤ 1e-10·dω_d` and `max|u| < 1`.
    pub fn new(grid: Arc<SphereGrid>, values: Vec<f64>, radius: f64, p: f64) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "R",
                value: radius,
                constraint: "must be positive and finite",
            });
        }
        if !(p >= 0.0 && p.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "p",
                value: p,
                constraint: "must be nonnegative and finite",
            });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteRadius { index });
        }
        let mean = grid.integrate(&values);
        if mean.abs() > MEAN_TOLERANCE * grid.area() {
            return Err(Error::NonZeroMean { mean });
        }
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        if !(1.0 + min > 0.0) {
            return Err(Error::GraphConditionViolated {
                min_one_plus_u: 1.0 + min,
                required: 0.0,
            });
        }
        Ok(Perturbation {
            grid,
            values,
            radius,
            p,
        })
    }

    /// Builds `u` from `f` sampled at the unit nodes, with its weighted mean
    /// removed.
    pub fn centered<F: Fn(Vec3) -> f64>(grid: Arc<SphereGrid>, f: F, radius: f64, p: f64) -> Result<Self> {
        let mut values: Vec<f64> = grid.nodes().iter().map(|&th| f(th)).collect();
        let mean = grid.mean(&values);
        for v in &mut values {
            *v -= mean;
        }
        Self::new(grid, values, radius, p)
    }

    /// Single mode of amplitude `eps`: `cos kθ` in `d = 2`, the zonal
    /// Legendre polynomial `P_k(cos φ)` in `d = 3`. Requires `k ≥ 1`.
    pub fn mode(grid: Arc<SphereGrid>, k: usize, eps: f64, radius: f64, p: f64) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter {
                name: "mode_k",
                value: 0.0,
                constraint: "must be at least 1 (mode 0 has nonzero mean)",
            });
        }
        let d = grid.dim();
        let values = grid
            .nodes()
            .iter()
            .map(|th| {
                if d == 2 {
                    eps * (k as f64 * th[1].atan2(th[0])).cos()
                } else {
                    eps * legendre(k, th[2])
                }
            })
            .collect();
        Self::new(grid, values, radius, p)
    }

    pub fn grid(&self) -> &Arc<SphereGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    /// `εu` on the same grid with the same `R` and `p`.
    pub fn scaled(&self, eps: f64) -> Result<Self> {
        Self::new(
            self.grid.clone(),
            self.values.iter().map(|v| eps * v).collect(),
            self.radius,
            self.p,
        )
    }
}

/// Legendre polynomial `P_k(x)` by the three-term recurrence.
fn legendre(k: usize, x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, x);
    if k == 0 {
        return prev;
    }
    for l in 1..k {
        let l = l as f64;
        let next = ((2.0 * l + 1.0) * x * cur - l * prev) / (l + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `‖u‖²_{H¹(S^{d-1})} = ∫u² + |∇_τ u|²`, with the gradient term computed
/// spectrally (exact for resolved band-limited `u`).
pub fn h1_norm_sq(u: &Perturbation) -> f64 {
    let l2 = u.grid.integrate(&u.values.iter().map(|v| v * v).collect::<Vec<_>>());
    l2 + u.grid.spectral_dirichlet(&u.values)
}

/// `r = R(1 + u)` centered at the origin. Requires `1 + u ≥ 1/2`.
pub fn shape_from_perturbation(u: &Perturbation) -> Result<StarShape> {
    let min = u.values.iter().copied().fold(f64::INFINITY, f64::min);
    if 1.0 + min < GRAPH_FLOOR {
        return Err(Error::GraphConditionViolated {
            min_one_plus_u: 1.0 + min,
            required: GRAPH_FLOOR,
        });
    }
    let radii = u.values.iter().map(|v| u.radius * (1.0 + v)).collect();
    StarShape::new(u.grid.clone(), &vec![0.0; u.dim()], radii)
}

/// Radius of the ball the perturbed shape is compared with.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ComparisonBall {
    /// Same quadrature volume as the perturbed shape.
    #[default]
    VolumeMatched,
    /// The base radius `R`; the deficit then carries the first-order volume
    /// excess of the perturbed shape.
    BaseRadius,
}

fn comparison_radius(shape: &StarShape, u: &Perturbation, ball: ComparisonBall) -> f64 {
    match ball {
        ComparisonBall::VolumeMatched => ball_radius_for_volume(u.dim(), shape.volume()),
        ComparisonBall::BaseRadius => u.radius,
    }
}

/// `P_a(Ω̃) − P_a(B)` with `a = |x|^p`, both perimeters by the grid quadrature.
pub fn perimeter_deficit(u: &Perturbation, ball: ComparisonBall) -> Result<f64> {
    let shape = shape_from_perturbation(u)?;
    let rb = comparison_radius(&shape, u, ball);
    let b = make_ball(rb, &vec![0.0; u.dim()], u.grid.clone())?;
    Ok(weighted_perimeter(&shape, u.p) - weighted_perimeter(&b, u.p))
}

/// `(I₁, I₂)` with `R^{d-1}(I₁ + I₂) = perimeter_deficit`:
///
/// `I₁ = R^p ∫(1+u)^q (√(1 + |∇_τ u|²/(1+u)²) − 1)`,
/// `I₂ = R^p ∫((1+u)^q − ρ^q)`, `q = p + d − 1`, `ρ = R_B/R`.
pub fn i1_i2_split(u: &Perturbation, ball: ComparisonBall) -> Result<(f64, f64)> {
    let shape = shape_from_perturbation(u)?;
    let d = u.dim();
    let q = u.p + d as f64 - 1.0;
    let rho = comparison_radius(&shape, u, ball) / u.radius;
    let grad = u.grid.stencil().apply(&u.values);
    let w = u.grid.weights();
    let rp = u.radius.powf(u.p);
    let i1 = neumaier(u.values.iter().zip(&grad).zip(w).map(|((v, g), w)| {
        let t = vec3::norm2(*g) / ((1.0 + v) * (1.0 + v));
        w * (1.0 + v).powf(q) * (t / ((1.0 + t).sqrt() + 1.0))
    }));
    let rho_q = rho.powf(q);
    let i2 = neumaier(u.values.iter().zip(w).map(|(v, w)| w * ((1.0 + v).powf(q) - rho_q)));
    Ok((rp * i1, rp * i2))
}

/// `V(B) − V(Ω̃)` against the volume-matched ball, with the sum of the two
/// Riesz error estimates as its error bar.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RieszDeficit {
    pub value: f64,
    pub error: f64,
}

pub fn riesz_deficit(u: &Perturbation, alpha: f64) -> Result<RieszDeficit> {
    let shape = shape_from_perturbation(u)?;
    let rb = ball_radius_for_volume(u.dim(), shape.volume());
    let b = make_ball(rb, &vec![0.0; u.dim()], u.grid.clone())?;
    let vs = riesz_self(&shape, alpha)?;
    let vb = riesz_self(&b, alpha)?;
    Ok(RieszDeficit {
        value: vb.value - vs.value,
        error: vs.error.unwrap_or(0.0).abs() + vb.error.unwrap_or(0.0).abs(),
    })
}

/// `perimeter_deficit / (γ · riesz_deficit)`; above one, the ball has lower
/// energy than the perturbed shape at this `γ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum StabilityRatio {
    Value { ratio: f64 },
    /// The Riesz deficit does not exceed its error bar.
    Indeterminate { riesz_deficit: f64, error: f64 },
}

impl StabilityRatio {
    pub fn value(&self) -> Option<f64> {
        match self {
            StabilityRatio::Value { ratio } => Some(*ratio),
            StabilityRatio::Indeterminate { .. } => None,
        }
    }
}

fn ratio_from(per: f64, riesz: RieszDeficit, gamma: f64) -> StabilityRatio {
    if riesz.value <= riesz.error || riesz.value <= 0.0 {
        StabilityRatio::Indeterminate {
            riesz_deficit: riesz.value,
            error: riesz.error,
        }
    } else {
        StabilityRatio::Value {
            ratio: per / (gamma * riesz.value),
        }
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "gamma",
            value: gamma,
            constraint: "must be positive and finite",
        })
    }
}

/// Both deficits use the volume-matched ball.
pub fn stability_ratio(u: &Perturbation, alpha: f64, gamma: f64) -> Result<StabilityRatio> {
    check_gamma(gamma)?;
    let per = perimeter_deficit(u, ComparisonBall::VolumeMatched)?;
    Ok(ratio_from(per, riesz_deficit(u, alpha)?, gamma))
}

/// Empirical threshold `γ̂` where the stability ratio crosses one, located by
/// bisection in `log γ` within `[lo, hi]` to relative width `rel_tol`.
pub fn threshold_gamma(u: &Perturbation, alpha: f64, lo: f64, hi: f64, rel_tol: f64) -> Result<f64> {
    check_gamma(lo)?;
    check_gamma(hi)?;
    if !(hi > lo) || !(rel_tol > 0.0) {
        return Err(Error::InvalidParameter {
            name: "bracket",
            value: hi,
            constraint: "need 0 < lo < hi and rel_tol > 0",
        });
    }
    let per = perimeter_deficit(u, ComparisonBall::VolumeMatched)?;
    let riesz = riesz_deficit(u, alpha)?;
    let above_one = |g: f64| -> Result<bool> {
        ratio_from(per, riesz, g)
            .value()
            .map(|r| r > 1.0)
            .ok_or_else(|| Error::Degenerate("Riesz deficit within its error bar".into()))
    };
    let (mut a, mut b) = (lo, hi);
    if !above_one(a)? || above_one(b)? {
        return Err(Error::Degenerate(format!(
            "stability ratio does not cross one in [{lo:e}, {hi:e}]"
        )));
    }
    while b / a - 1.0 > rel_tol {
        let mid = (a * b).sqrt();
        if above_one(mid)? {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok((a * b).sqrt())
}

/// Random zero-mean perturbation with `max|u| + max|∇_τ u| = c1` at the grid
/// nodes: a sum of `terms` plane waves `cos(k·θ + φ)` with `|k| ≤ kmax`.
pub fn random_perturbation(
    grid: Arc<SphereGrid>,
    radius: f64,
    p: f64,
    c1: f64,
    kmax: f64,
    terms: usize,
    seed: u64,
) -> Result<Perturbation> {
    let d = grid.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let waves: Vec<(f64, Vec3, f64)> = (0..terms.max(1))
        .map(|_| {
            let mut k = [0.0; 3];
            for c in k.iter_mut().take(d) {
                *c = rng.gen_range(-kmax..=kmax);
            }
            (rng.gen_range(-1.0..=1.0), k, rng.gen_range(0.0..std::f64::consts::TAU))
        })
        .collect();
    let nodes = grid.nodes();
    let mut u: Vec<f64> = nodes
        .iter()
        .map(|&th| waves.iter().map(|(a, k, ph)| a * (vec3::dot(*k, th) + ph).cos()).sum())
        .collect();
    let grad: Vec<f64> = nodes
        .iter()
        .map(|&th| {
            let g = waves.iter().fold(vec3::ZERO, |acc, (a, k, ph)| {
                let kt = vec3::sub(*k, vec3::scale(th, vec3::dot(*k, th)));
                vec3::add(acc, vec3::scale(kt, -a * (vec3::dot(*k, th) + ph).sin()))
            });
            vec3::norm(g)
        })
        .collect();
    let mean = grid.mean(&u);
    for v in &mut u {
        *v -= mean;
    }
    let c1_now = u.iter().fold(0.0f64, |m, v| m.max(v.abs())) + grad.iter().fold(0.0f64, |m, g| m.max(*g));
    if !(c1_now > 0.0) {
        return Err(Error::Degenerate("random perturbation vanished".into()));
    }
    let s = c1 / c1_now;
    Perturbation::new(grid, u.into_iter().map(|v| v * s).collect(), radius, p)
}

/// One line of the deficit report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeficitRow {
    pub mode_k: usize,
    pub eps: f64,
    #[serde(rename = "R")]
    pub radius: f64,
    pub p: f64,
    pub alpha: f64,
    pub per_deficit: f64,
    pub riesz_deficit: f64,
    pub h1_sq: f64,
    /// `per_deficit / riesz_deficit`: the stability ratio at `γ = 1`, i.e. the
    /// threshold `γ̂` of this perturbation. `None` when indeterminate.
    pub ratio: Option<f64>,
}

pub const DEFICIT_CSV_HEADER: &str = "mode_k,eps,R,p,alpha,per_deficit,riesz_deficit,h1_sq,ratio";

pub fn deficit_row(grid: Arc<SphereGrid>, k: usize, eps: f64, radius: f64, p: f64, alpha: f64) -> Result<DeficitRow> {
    let u = Perturbation::mode(grid, k, eps, radius, p)?;
    let per = perimeter_deficit(&u, ComparisonBall::VolumeMatched)?;
    let riesz = riesz_deficit(&u, alpha)?;
    Ok(DeficitRow {
        mode_k: k,
        eps,
        radius,
        p,
        alpha,
        per_deficit: per,
        riesz_deficit: riesz.value,
        h1_sq: h1_norm_sq(&u),
        ratio: ratio_from(per, riesz, 1.0).value(),
    })
}

/// Deficit rows over `modes × eps`, computed in parallel, in input order.
pub fn deficit_suite(
    d: usize,
    n: usize,
    modes: &[usize],
    eps: &[f64],
    radius: f64,
    p: f64,
    alpha: f64,
) -> Result<Vec<DeficitRow>> {
    let grid = Arc::new(make_grid(d, n)?);
    let jobs: Vec<(usize, f64)> = modes.iter().flat_map(|&k| eps.iter().map(move |&e| (k, e))).collect();
    jobs.par_iter()
        .map(|&(k, e)| deficit_row(grid.clone(), k, e, radius, p, alpha))
        .collect()
}

pub fn write_deficit_csv<W: Write>(rows: &[DeficitRow], mut out: W) -> Result<()> {
    writeln!(out, "{DEFICIT_CSV_HEADER}")?;
    for r in rows {
        let ratio = r.ratio.map(|x| format!("{x:.16e}")).unwrap_or_default();
        writeln!(
            out,
            "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}",
            r.mode_k, r.eps, r.radius, r.p, r.alpha, r.per_deficit, r.riesz_deficit, r.h1_sq, ratio
        )?;
    }
    Ok(())
}

/// Leading-order perimeter deficit per `ε²` for `u = ε cos kθ` on the circle
/// against `B_R`: `πR^{p+1}(p(p+1) + k²)/2`.
pub fn circle_mode_deficit_coefficient(k: usize, radius: f64, p: f64) -> f64 {
    std::f64::consts::PI * radius.powf(p + 1.0) * (p * (p + 1.0) + (k * k) as f64) / 2.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn circle(n: usize) -> Arc<SphereGrid> {
        Arc::new(make_grid(2, n).unwrap())
    }

    #[test]
    fn h1_of_circle_mode() {
        for k in 1..6 {
            let u = Perturbation::mode(circle(128), k, 0.1, 1.0, 2.0).unwrap();
            let expect = 0.01 * PI * (1.0 + (k * k) as f64);
            assert!((h1_norm_sq(&u) - expect).abs() < 1e-12, "k {k}");
        }
    }

    #[test]
    fn h1_of_zonal_mode() {
        let g = Arc::new(make_grid(3, 16).unwrap());
        for k in 1..6 {
            let u = Perturbation::mode(g.clone(), k, 0.1, 1.0, 2.0).unwrap();
            let kf = k as f64;
            let expect = 0.01 * 4.0 * PI / (2.0 * kf + 1.0) * (1.0 + kf * (kf + 1.0));
            assert!((h1_norm_sq(&u) - expect).abs() < 1e-12, "k {k}: {}", h1_norm_sq(&u));
        }
    }

    #[test]
    fn split_is_exact() {
        let u = Perturbation::mode(circle(128), 3, 0.05, 1.3, 2.0).unwrap();
        for ball in [ComparisonBall::VolumeMatched, ComparisonBall::BaseRadius] {
            let (i1, i2) = i1_i2_split(&u, ball).unwrap();
            let per = perimeter_deficit(&u, ball).unwrap();
            assert!((1.3 * (i1 + i2) - per).abs() < 1e-12, "{ball:?}");
        }
    }

    #[test]
    fn rejects_bad_perturbations() {
        let g = circle(64);
        assert!(matches!(
            Perturbation::new(g.clone(), vec![0.1; 64], 1.0, 2.0),
            Err(Error::NonZeroMean { .. })
        ));
        let u = Perturbation::mode(g, 2, 0.6, 1.0, 2.0).unwrap();
        assert!(matches!(
            shape_from_perturbation(&u),
            Err(Error::GraphConditionViolated { .. })
        ));
    }

    #[test]
    fn legendre_values() {
        assert_eq!(legendre(0, 0.3), 1.0);
        assert!((legendre(2, 0.3) - (3.0 * 0.09 - 1.0) / 2.0).abs() < 1e-15);
        assert!((legendre(3, 0.3) - (5.0 * 0.027 - 3.0 * 0.3) / 2.0).abs() < 1e-15);
    }
}
