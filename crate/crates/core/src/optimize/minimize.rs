//! Volume-constrained descent in an `H¹` metric with Armijo backtracking.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::gradient::shape_gradient;
use super::sweep::SweepRecord;
use crate::energy::riesz::riesz_config_value;
use crate::energy::riesz_config;
use crate::energy::sum::neumaier;
use crate::energy::{weighted_perimeter, ComponentGradient};
use crate::geometry::vec3::{self, Vec3};
use crate::geometry::{
    ball_radius_for_volume, make_grid, unit_ball_volume, Configuration, EnergyParams, SphereGrid,
    StarShape,
};
use crate::{Error, Result};

const STALL_WINDOW: usize = 20;

/// Smoothing of `|·|` in the penalty term.
pub const PENALTY_SMOOTHING: f64 = 1e-8;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConstraintMode {
    /// Dilation about the origin back to the target volume after each step.
    #[default]
    Projection,
    /// `λ √((|Ω| − m)² + ε²)` added to the objective, projected at the end.
    Penalty,
}

/// Initial configurations, all scaled to the target volume.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InitSpec {
    Ball,
    /// `r = r₀(1 + ε Y_k)` with `Y_k = cos k(θ − θ₀)` on the circle and the
    /// zonal Legendre polynomial `P_k(θ·a)` on the sphere; `θ₀`, `a` drawn
    /// from the seed.
    PerturbedBall { eps: f64, mode: usize },
    /// `count` equal balls with neighbouring centers `spacing` apart on a
    /// circle around the origin.
    Multiball { count: usize, spacing: f64 },
}

impl Default for InitSpec {
    fn default() -> Self {
        InitSpec::Ball
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerOptions {
    pub max_iter: usize,
    pub g_tol: f64,
    /// Initial step length `s₀`.
    pub step0: f64,
    pub armijo_c1: f64,
    pub shrink: f64,
    pub max_backtracks: usize,
    pub constraint: ConstraintMode,
    /// Penalty weight `λ` (penalty mode only).
    pub lambda: f64,
    pub seed: u64,
    pub init: InitSpec,
    pub target_volume: f64,
    /// Length scale `ℓ` of the `H¹` metric `∫ q² + ℓ²|∇_τ q|²`.
    pub sobolev_length: f64,
    /// Trial steps whose Riesz error estimate exceeds this fraction of `V`
    /// are rejected, keeping iterates resolved by the grid.
    pub resolution_tol: f64,
    /// Largest displacement of any radius or center in one step, as a
    /// fraction of the component's maximal radius.
    pub max_step_fraction: f64,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        OptimizerOptions {
            max_iter: 2000,
            g_tol: 1e-6,
            step0: 1.0,
            armijo_c1: 1e-4,
            shrink: 0.5,
            max_backtracks: 60,
            constraint: ConstraintMode::Projection,
            lambda: 0.0,
            seed: 0,
            init: InitSpec::Ball,
            target_volume: 1.0,
            sobolev_length: 1.0,
            resolution_tol: 1e-5,
            max_step_fraction: 0.1,
        }
    }
}

impl OptimizerOptions {
    pub fn validate(&self) -> Result<()> {
        let bad = |name, value, constraint| Err(Error::InvalidParameter { name, value, constraint });
        if self.max_iter < 1 {
            return bad("max_iter", self.max_iter as f64, "must be >= 1");
        }
        if !(self.g_tol > 0.0) {
            return bad("g_tol", self.g_tol, "must be positive");
        }
        if !(self.step0 > 0.0) {
            return bad("step0", self.step0, "must be positive");
        }
        if !(self.armijo_c1 > 0.0 && self.armijo_c1 < 1.0) {
            return bad("armijo_c1", self.armijo_c1, "must lie in (0, 1)");
        }
        if !(self.shrink > 0.0 && self.shrink < 1.0) {
            return bad("shrink", self.shrink, "must lie in (0, 1)");
        }
        if !(self.lambda >= 0.0) {
            return bad("lambda", self.lambda, "must be >= 0");
        }
        if self.constraint == ConstraintMode::Penalty && self.lambda == 0.0 {
            return bad("lambda", self.lambda, "penalty mode needs lambda > 0");
        }
        if !(self.target_volume > 0.0) {
            return bad("target_volume", self.target_volume, "must be positive");
        }
        if !(self.max_step_fraction > 0.0) {
            return bad("max_step_fraction", self.max_step_fraction, "must be positive");
        }
        if !(self.resolution_tol > 0.0) {
            return bad("resolution_tol", self.resolution_tol, "must be positive");
        }
        if !(self.sobolev_length >= 0.0) {
            return bad("sobolev_length", self.sobolev_length, "must be >= 0");
        }
        match self.init {
            InitSpec::PerturbedBall { eps, .. } if !(eps.abs() < 1.0) => {
                bad("eps", eps, "must satisfy |eps| < 1")
            }
            InitSpec::Multiball { count: 0, .. } => bad("count", 0.0, "must be >= 1"),
            InitSpec::Multiball { spacing, .. } if !(spacing > 0.0) => {
                bad("spacing", spacing, "must be positive")
            }
            _ => Ok(()),
        }
    }
}

/// Builds the initial configuration described by `spec` at resolution `n`.
pub fn initial_configuration(
    spec: &InitSpec,
    d: usize,
    n: usize,
    target_volume: f64,
    seed: u64,
) -> Result<Configuration> {
    let grid = Arc::new(make_grid(d, n)?);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shapes = match *spec {
        InitSpec::Ball => vec![ball(&grid, target_volume, vec3::ZERO)?],
        InitSpec::PerturbedBall { eps, mode } => {
            let r0 = ball_radius_for_volume(d, target_volume);
            let radii: Vec<f64> = if d == 2 {
                let t0 = rng.gen::<f64>() * 2.0 * PI;
                grid.nodes()
                    .iter()
                    .map(|x| r0 * (1.0 + eps * (mode as f64 * (x[1].atan2(x[0]) - t0)).cos()))
                    .collect()
            } else {
                let a = random_unit(&mut rng);
                grid.nodes()
                    .iter()
                    .map(|x| r0 * (1.0 + eps * legendre(mode, vec3::dot(a, *x))))
                    .collect()
            };
            let s = StarShape::new(Arc::clone(&grid), &vec![0.0; d], radii)?;
            let t = (target_volume / s.volume()).powf(1.0 / d as f64);
            vec![s.dilate(t)?]
        }
        InitSpec::Multiball { count, spacing } => {
            let each = target_volume / count as f64;
            if count == 1 {
                vec![ball(&grid, each, vec3::ZERO)?]
            } else {
                let ring = spacing / (2.0 * (PI / count as f64).sin());
                (0..count)
                    .map(|i| {
                        let t = 2.0 * PI * i as f64 / count as f64;
                        ball(&grid, each, [ring * t.cos(), ring * t.sin(), 0.0])
                    })
                    .collect::<Result<_>>()?
            }
        }
    };
    Configuration::new(shapes)
}

fn ball(grid: &Arc<SphereGrid>, volume: f64, center: Vec3) -> Result<StarShape> {
    let d = grid.dim();
    crate::geometry::make_ball(ball_radius_for_volume(d, volume), &center[..d], Arc::clone(grid))
}

fn random_unit(rng: &mut ChaCha8Rng) -> Vec3 {
    let z: f64 = 2.0 * rng.gen::<f64>() - 1.0;
    let t: f64 = 2.0 * PI * rng.gen::<f64>();
    let s = (1.0 - z * z).sqrt();
    [s * t.cos(), s * t.sin(), z]
}

fn legendre(k: usize, x: f64) -> f64 {
    let (mut p0, mut p1) = (1.0, x);
    if k == 0 {
        return p0;
    }
    for j in 1..k {
        let p2 = ((2 * j + 1) as f64 * x * p1 - j as f64 * p0) / (j + 1) as f64;
        p0 = p1;
        p1 = p2;
    }
    p1
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Converged,
    /// Iteration cap reached; the result is the last accepted iterate.
    MaxIterations,
    /// Backtracking found no acceptable step.
    LineSearchFailed,
    /// Every remaining descent step leaves the resolved regime (Riesz
    /// error estimate above `resolution_tol`).
    ResolutionLimited,
}

enum Rejection {
    Invalid,
    Unresolved,
}

#[derive(Clone, Debug)]
pub struct Minimization {
    pub config: Configuration,
    pub record: SweepRecord,
    pub status: Status,
    /// Objective after every accepted step, starting with the initial value.
    pub objective_history: Vec<f64>,
    pub gradient_norm: f64,
}

struct Problem<'a> {
    params: &'a EnergyParams,
    opts: &'a OptimizerOptions,
}

impl Problem<'_> {
    fn volume(&self, cfg: &Configuration) -> f64 {
        cfg.volume_unchecked()
    }

    fn objective(&self, cfg: &Configuration) -> Result<f64> {
        let per = neumaier(cfg.components().iter().map(|s| weighted_perimeter(s, self.params.p)));
        let riesz = if self.params.gamma == 0.0 {
            0.0
        } else {
            riesz_config_value(cfg, self.params.alpha)?
        };
        Ok(self.assemble(cfg, per, riesz))
    }

    /// Objective of a trial step, or why it is not admissible.
    fn trial_objective(&self, cfg: &Configuration) -> Result<std::result::Result<f64, Rejection>> {
        let per = neumaier(cfg.components().iter().map(|s| weighted_perimeter(s, self.params.p)));
        let riesz = if self.params.gamma == 0.0 {
            0.0
        } else {
            let v = riesz_config(cfg, self.params.alpha)?;
            if let Some(err) = v.error {
                if !(err <= self.opts.resolution_tol * v.value.abs()) {
                    return Ok(Err(Rejection::Unresolved));
                }
            }
            v.value
        };
        let f = self.assemble(cfg, per, riesz);
        Ok(if f.is_finite() { Ok(f) } else { Err(Rejection::Invalid) })
    }

    fn assemble(&self, cfg: &Configuration, per: f64, riesz: f64) -> f64 {
        let mut f = per + self.params.gamma * riesz;
        if self.opts.constraint == ConstraintMode::Penalty {
            let dv = self.volume(cfg) - self.opts.target_volume;
            f += self.opts.lambda * (dv * dv + PENALTY_SMOOTHING * PENALTY_SMOOTHING).sqrt();
        }
        f
    }

    /// Gradient of the objective and of `E_γ` alone.
    fn gradient(&self, cfg: &Configuration) -> Result<(Vec<ComponentGradient>, Vec<ComponentGradient>)> {
        let e = shape_gradient(cfg, self.params)?;
        let mut f = e.clone();
        if self.opts.constraint == ConstraintMode::Penalty {
            let dv = self.volume(cfg) - self.opts.target_volume;
            let k = self.opts.lambda * dv / (dv * dv + PENALTY_SMOOTHING * PENALTY_SMOOTHING).sqrt();
            for (g, s) in f.iter_mut().zip(cfg.components()) {
                for (o, v) in g.dr.iter_mut().zip(volume_gradient(s)) {
                    *o += k * v;
                }
            }
        }
        Ok((f, e))
    }

    fn center_metric(&self, d: usize) -> f64 {
        unit_ball_volume(d) * (1.0 + self.opts.sobolev_length.powi(2))
    }

    /// `−Q G` with `Q = F M⁻¹ Fᵀ`, `F` the band-limit projection, restricted
    /// to the volume tangent in projection mode. `Q` is symmetric positive
    /// semidefinite, so the result is a descent direction.
    fn direction(&self, cfg: &Configuration, grad: &[ComponentGradient]) -> Vec<ComponentGradient> {
        let d = cfg.dim().unwrap_or(2);
        let cm = self.center_metric(d);
        let l2 = self.opts.sobolev_length.powi(2);
        let precondition = |s: &StarShape, covector: &[f64]| -> Vec<f64> {
            let grid = s.grid();
            let w = grid.weights();
            let density: Vec<f64> = covector.iter().zip(w).map(|(g, w)| g / w).collect();
            let filtered: Vec<f64> = grid.band_limit(&density).iter().zip(w).map(|(g, w)| g * w).collect();
            grid.band_limit(&sobolev_solve(grid, l2, &filtered))
        };
        let mut q: Vec<ComponentGradient> = cfg
            .components()
            .iter()
            .zip(grad)
            .map(|(s, g)| ComponentGradient {
                dr: precondition(s, &g.dr),
                dc: vec3::scale(g.dc, 1.0 / cm),
            })
            .collect();
        if self.opts.constraint == ConstraintMode::Projection {
            let vg: Vec<Vec<f64>> = cfg.components().iter().map(volume_gradient).collect();
            let z: Vec<Vec<f64>> = cfg
                .components()
                .iter()
                .zip(&vg)
                .map(|(s, v)| precondition(s, v))
                .collect();
            let num: f64 = grad.iter().zip(&z).map(|(g, z)| dot(&g.dr, z)).sum();
            let den: f64 = vg.iter().zip(&z).map(|(v, z)| dot(v, z)).sum();
            let mu = num / den;
            for (qk, zk) in q.iter_mut().zip(&z) {
                for (a, b) in qk.dr.iter_mut().zip(zk) {
                    *a -= mu * b;
                }
            }
        }
        for qk in &mut q {
            qk.dr.iter_mut().for_each(|x| *x = -*x);
            qk.dc = vec3::scale(qk.dc, -1.0);
        }
        q
    }

    fn trial(&self, cfg: &Configuration, dir: &[ComponentGradient], t: f64) -> Option<Configuration> {
        let d = cfg.dim()?;
        let comps: Vec<StarShape> = cfg
            .components()
            .iter()
            .zip(dir)
            .map(|(s, q)| {
                let r: Vec<f64> = s.radii().iter().zip(&q.dr).map(|(r, dr)| r + t * dr).collect();
                let mut c = s.center3();
                vec3::axpy(&mut c, t, q.dc);
                s.with_clamped(c, r)
            })
            .collect();
        let mut out = Configuration::new_unchecked(comps);
        if self.opts.constraint == ConstraintMode::Projection {
            out = project(&out, self.opts.target_volume, d);
        }
        if out.components().iter().any(|s| s.radii().iter().any(|r| !r.is_finite())) {
            return None;
        }
        out.validate().ok()?;
        Some(out)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `∂|Ω|/∂r_j = w_j r_j^{d−1}`.
pub(crate) fn volume_gradient(s: &StarShape) -> Vec<f64> {
    let d = s.dim() as i32;
    s.radii()
        .iter()
        .zip(s.grid().weights())
        .map(|(r, w)| w * r.powi(d - 1))
        .collect()
}

/// Dilation about the origin to the target volume, radii clamped to the floor.
fn project(cfg: &Configuration, target: f64, d: usize) -> Configuration {
    let t = (target / cfg.volume_unchecked()).powf(1.0 / d as f64);
    Configuration::new_unchecked(
        cfg.components()
            .iter()
            .map(|s| {
                let r = s.radii().iter().map(|r| r * t).collect();
                s.with_clamped(vec3::scale(s.center3(), t), r)
            })
            .collect(),
    )
}

/// Solves `(W + ℓ² Tᵀ W T) q = b` by Jacobi-preconditioned conjugate gradients.
fn sobolev_solve(grid: &SphereGrid, l2: f64, b: &[f64]) -> Vec<f64> {
    let w = grid.weights();
    let st = grid.stencil();
    let apply = |x: &[f64]| -> Vec<f64> {
        let mut y: Vec<f64> = x.iter().zip(w).map(|(x, w)| w * x).collect();
        if l2 > 0.0 {
            let g: Vec<Vec3> = st.apply(x).iter().zip(w).map(|(g, w)| vec3::scale(*g, w * l2)).collect();
            for (a, b) in y.iter_mut().zip(st.apply_transpose(&g)) {
                *a += b;
            }
        }
        y
    };
    let diag: Vec<f64> = st
        .gram_diagonal(w)
        .iter()
        .zip(w)
        .map(|(g, w)| w + l2 * g)
        .collect();
    let mut x = vec![0.0; b.len()];
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&diag).map(|(r, d)| r / d).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let b_norm = dot(b, b).sqrt();
    if b_norm == 0.0 {
        return x;
    }
    for _ in 0..10 * b.len().max(50) {
        let ap = apply(&p);
        let alpha = rz / dot(&p, &ap);
        for i in 0..x.len() {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        if dot(&r, &r).sqrt() <= 1e-13 * b_norm {
            break;
        }
        z = r.iter().zip(&diag).map(|(r, d)| r / d).collect();
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..p.len() {
            p[i] = z[i] + beta * p[i];
        }
    }
    x
}

/// Volume-constrained stationarity: the `L²(σ)` norm of the band-limited
/// gradient density with its component along `∂|Ω|` removed, plus the
/// center forces.
pub fn stationarity(cfg: &Configuration, grad: &[ComponentGradient]) -> f64 {
    let Some(d) = cfg.dim() else { return 0.0 };
    let densities: Vec<Vec<f64>> = cfg
        .components()
        .iter()
        .zip(grad)
        .map(|(s, g)| {
            let dens: Vec<f64> = g.dr.iter().zip(s.grid().weights()).map(|(g, w)| g / w).collect();
            s.grid().band_limit(&dens)
        })
        .collect();
    let (mut num, mut den) = (0.0, 0.0);
    for (s, g) in cfg.components().iter().zip(&densities) {
        for ((gj, w), r) in g.iter().zip(s.grid().weights()).zip(s.radii()) {
            let v = r.powi(d as i32 - 1);
            num += w * gj * v;
            den += w * v * v;
        }
    }
    let mu = if den > 0.0 { num / den } else { 0.0 };
    let mut total = 0.0;
    for ((s, g), cg) in cfg.components().iter().zip(&densities).zip(grad) {
        for ((gj, w), r) in g.iter().zip(s.grid().weights()).zip(s.radii()) {
            let dens = gj - mu * r.powi(d as i32 - 1);
            total += w * dens * dens;
        }
        total += vec3::norm2(cg.dc) / unit_ball_volume(d);
    }
    total.sqrt()
}

/// Minimizes `E_γ` at fixed volume starting from `init`.
pub fn minimize(
    init: &Configuration,
    params: &EnergyParams,
    opts: &OptimizerOptions,
) -> Result<Minimization> {
    params.validate()?;
    opts.validate()?;
    init.validate()?;
    let d = init.dim().ok_or_else(|| Error::Degenerate("empty configuration".into()))?;
    if d != params.d {
        return Err(Error::UnsupportedDimension(d));
    }
    let v0 = init.volume_unchecked() / opts.target_volume;
    if !(0.5..=2.0).contains(&v0) {
        return Err(Error::InvalidParameter {
            name: "volume",
            value: v0,
            constraint: "initial volume must lie within [0.5, 2] of the target",
        });
    }
    let prob = Problem { params, opts };
    let mut cfg = match opts.constraint {
        ConstraintMode::Projection => project(init, opts.target_volume, d),
        ConstraintMode::Penalty => init.clone(),
    };
    cfg.validate()?;
    let mut f = prob.objective(&cfg)?;
    let mut history = vec![f];
    let mut t = opts.step0;
    let mut status = Status::MaxIterations;
    let mut iterations = 0;
    let mut last_unresolved = None;
    let (mut grad, mut egrad) = prob.gradient(&cfg)?;
    let mut gnorm = stationarity(&cfg, &egrad);
    while iterations < opts.max_iter {
        if gnorm <= opts.g_tol {
            status = Status::Converged;
            break;
        }
        let dir = prob.direction(&cfg, &grad);
        let slope: f64 = grad
            .iter()
            .zip(&dir)
            .map(|(g, q)| dot(&g.dr, &q.dr) + vec3::dot(g.dc, q.dc))
            .sum();
        if !(slope < 0.0) {
            status = Status::LineSearchFailed;
            break;
        }
        let t_max = cfg
            .components()
            .iter()
            .zip(&dir)
            .map(|(s, q)| {
                let reach = q.dr.iter().fold(vec3::norm(q.dc), |m, x| m.max(x.abs()));
                opts.max_step_fraction * s.max_radius() / reach
            })
            .fold(f64::INFINITY, f64::min);
        t = t.min(t_max);
        let mut accepted = None;
        let mut unresolved = false;
        for _ in 0..=opts.max_backtracks {
            match prob.trial(&cfg, &dir, t).map(|c| (prob.trial_objective(&c), c)) {
                Some((Ok(Ok(ft)), trial)) if ft <= f + opts.armijo_c1 * t * slope => {
                    accepted = Some((trial, ft));
                    break;
                }
                Some((Ok(Err(Rejection::Unresolved)), _)) => unresolved = true,
                Some((Err(e), _)) => return Err(e),
                _ => {}
            }
            t *= opts.shrink;
        }
        let Some((next, fnext)) = accepted else {
            status = if unresolved {
                Status::ResolutionLimited
            } else {
                Status::LineSearchFailed
            };
            break;
        };
        if unresolved {
            last_unresolved = Some(iterations);
        }
        cfg = next;
        f = fnext;
        history.push(f);
        iterations += 1;
        // pinned against the resolution limit: steps shrink to nothing
        if let Some(u) = last_unresolved {
            let k = history.len();
            if k > STALL_WINDOW
                && iterations - u < STALL_WINDOW
                && history[k - 1 - STALL_WINDOW] - f <= 1e-10 * f.abs()
            {
                status = Status::ResolutionLimited;
                break;
            }
        }
        t = (2.0 * t).min(1e3 * opts.step0);
        (grad, egrad) = prob.gradient(&cfg)?;
        gnorm = stationarity(&cfg, &egrad);
    }
    if status == Status::MaxIterations && gnorm <= opts.g_tol {
        status = Status::Converged;
    }
    if opts.constraint == ConstraintMode::Penalty {
        cfg = project(&cfg, opts.target_volume, d);
        cfg.validate()?;
        gnorm = stationarity(&cfg, &shape_gradient(&cfg, params)?);
        if status == Status::Converged && gnorm > opts.g_tol {
            status = Status::MaxIterations;
        }
    }
    let record = SweepRecord::from_result(&cfg, params, iterations, status == Status::Converged)?;
    Ok(Minimization {
        config: cfg,
        record,
        status,
        objective_history: history,
        gradient_norm: gnorm,
    })
}

