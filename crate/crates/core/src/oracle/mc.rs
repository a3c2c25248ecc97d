//! Monte Carlo Riesz energies `∫_A ∫_B |x − y|^{-α}`.
//!
//! The outer point is drawn uniformly from `A` with an exact importance
//! weight. The inner integral is sampled in polar coordinates around `x`:
//! a uniform direction and a distance with density `∝ ρ^{d-1-α}` on the
//! shell where the ray can meet `B`'s bounding ball. The estimator is then
//! bounded, so its variance is finite for every `α < d`.
//!
//! Every sample consumes the same tuple of [`TUPLE`] uniforms, so two
//! estimates with the same seed use common random numbers. Samples are
//! grouped in fixed chunks, each with its own ChaCha stream, so the result
//! does not depend on the worker count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::raster::RasterSet;
use crate::geometry::{sphere_area, unit_ball_volume, vec3, Configuration, StarShape, Vec3};
use crate::{Error, Result};

/// Uniforms per sample: component choice, outer direction (2), outer radius,
/// inner direction (2), inner distance.
pub const TUPLE: usize = 7;

/// Samples per random stream.
pub const CHUNK: usize = 1 << 16;

/// Fewest samples [`mc_riesz`] accepts.
pub const MIN_SAMPLES: usize = 1_000_000;

/// A bounded set that can be sampled uniformly.
pub trait Region: Sync {
    fn dim(&self) -> usize;
    fn contains(&self, x: Vec3) -> bool;
    /// Center and radius of a ball containing the set.
    fn bounding_ball(&self) -> (Vec3, f64);
    /// A point of the set from uniforms, with weight `1 / density`.
    fn sample(&self, u: &[f64; TUPLE]) -> (Vec3, f64);
}

fn direction(d: usize, a: f64, b: f64) -> Vec3 {
    let t = std::f64::consts::TAU * a;
    if d == 2 {
        [t.cos(), t.sin(), 0.0]
    } else {
        let z = 2.0 * b - 1.0;
        let s = (1.0 - z * z).max(0.0).sqrt();
        [s * t.cos(), s * t.sin(), z]
    }
}

fn star_sample(shape: &StarShape, u: &[f64; TUPLE]) -> (Vec3, f64) {
    let d = shape.dim();
    let dir = direction(d, u[1], u[2]);
    let r = shape.radius_at(dir);
    // ρ = s^{1/d} r(θ) is uniform in the interpolated star; density 1/(ω_d r^d)
    let rho = u[3].powf(1.0 / d as f64) * r;
    let c = shape.center3();
    (vec3::add(c, vec3::scale(dir, rho)), unit_ball_volume(d) * r.powi(d as i32))
}

impl Region for StarShape {
    fn dim(&self) -> usize {
        StarShape::dim(self)
    }

    fn contains(&self, x: Vec3) -> bool {
        StarShape::contains(self, x)
    }

    fn bounding_ball(&self) -> (Vec3, f64) {
        (self.center3(), 1.1 * self.max_radius())
    }

    fn sample(&self, u: &[f64; TUPLE]) -> (Vec3, f64) {
        star_sample(self, u)
    }
}

impl Region for Configuration {
    fn dim(&self) -> usize {
        Configuration::dim(self).unwrap_or(0)
    }

    fn contains(&self, x: Vec3) -> bool {
        Configuration::contains(self, x)
    }

    fn bounding_ball(&self) -> (Vec3, f64) {
        let comps = self.components();
        let k = comps.len() as f64;
        let mut c = vec3::ZERO;
        for s in comps {
            c = vec3::add(c, vec3::scale(s.center3(), 1.0 / k));
        }
        let r = comps
            .iter()
            .map(|s| vec3::norm(vec3::sub(s.center3(), c)) + 1.1 * s.max_radius())
            .fold(0.0, f64::max);
        (c, r)
    }

    /// Component chosen uniformly; components are disjoint, so the weight
    /// is the component weight times the component count.
    fn sample(&self, u: &[f64; TUPLE]) -> (Vec3, f64) {
        let comps = self.components();
        let k = ((u[0] * comps.len() as f64) as usize).min(comps.len() - 1);
        let (x, w) = star_sample(&comps[k], u);
        (x, w * comps.len() as f64)
    }
}

impl Region for RasterSet {
    fn dim(&self) -> usize {
        2
    }

    fn contains(&self, x: Vec3) -> bool {
        self.contains_point([x[0], x[1]])
    }

    fn bounding_ball(&self) -> (Vec3, f64) {
        let b = self.bounds();
        let c = [(b.x0 + b.x1) / 2.0, (b.y0 + b.y1) / 2.0, 0.0];
        (c, 0.5 * ((b.x1 - b.x0).powi(2) + (b.y1 - b.y0).powi(2)).sqrt())
    }

    fn sample(&self, u: &[f64; TUPLE]) -> (Vec3, f64) {
        let n = self.occupied_count();
        let k = ((u[0] * n as f64) as usize).min(n - 1);
        let (i, j) = self.occupied_cell(k);
        let h = self.h();
        ([(i as f64 + u[1]) * h, (j as f64 + u[2]) * h, 0.0], self.volume())
    }
}

/// `∫_B |x − y|^{-α} dy` estimated from one inner direction/distance pair.
fn inner(b: &dyn Region, ball: (Vec3, f64), x: Vec3, alpha: f64, u: &[f64; TUPLE]) -> f64 {
    let d = b.dim();
    let e = d as f64 - alpha;
    let dist = vec3::norm(vec3::sub(x, ball.0));
    let lo = (dist - ball.1).max(0.0);
    let hi = dist + ball.1;
    let (lo_e, hi_e) = (lo.powf(e), hi.powf(e));
    let mass = (hi_e - lo_e) / e;
    let rho = (lo_e + u[6] * (hi_e - lo_e)).powf(1.0 / e);
    let y = vec3::add(x, vec3::scale(direction(d, u[4], u[5]), rho));
    if b.contains(y) {
        sphere_area(d) * mass
    } else {
        0.0
    }
}

fn sample_value(a: &dyn Region, b: &dyn Region, ball_b: (Vec3, f64), alpha: f64, u: &[f64; TUPLE]) -> f64 {
    let (x, w) = a.sample(u);
    w * inner(b, ball_b, x, alpha, u)
}

/// Estimate with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub samples: usize,
}

fn check(a: &dyn Region, b: &dyn Region, alpha: f64, n: usize) -> Result<()> {
    let d = a.dim();
    if d != b.dim() || !(d == 2 || d == 3) {
        return Err(Error::UnsupportedDimension(d.max(b.dim())));
    }
    if !(alpha > 0.0 && alpha < d as f64) {
        return Err(Error::InvalidParameter {
            name: "alpha",
            value: alpha,
            constraint: "must lie in (0, d)",
        });
    }
    if n < MIN_SAMPLES {
        return Err(Error::InvalidParameter {
            name: "n_samples",
            value: n as f64,
            constraint: "must be at least 1e6",
        });
    }
    Ok(())
}

/// Sums `f(u)` and `f(u)²` over `n` tuples drawn from chunked streams.
fn accumulate<F: Fn(&[f64; TUPLE]) -> f64 + Sync>(n: usize, seed: u64, f: F) -> McEstimate {
    let chunks = n.div_ceil(CHUNK);
    let partial: Vec<(f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let len = CHUNK.min(n - c * CHUNK);
            let (mut s, mut s2) = (0.0, 0.0);
            let mut u = [0.0; TUPLE];
            for _ in 0..len {
                for v in u.iter_mut() {
                    *v = rng.gen::<f64>();
                }
                let v = f(&u);
                s += v;
                s2 += v * v;
            }
            (s, s2)
        })
        .collect();
    let (s, s2) = partial.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let nf = n as f64;
    let mean = s / nf;
    let var = ((s2 / nf - mean * mean) * nf / (nf - 1.0)).max(0.0);
    McEstimate {
        estimate: mean,
        std_error: (var / nf).sqrt(),
        samples: n,
    }
}

/// `∫_A ∫_B |x − y|^{-α}`; `b = None` gives the self-energy of `A`.
pub fn mc_riesz(a: &dyn Region, b: Option<&dyn Region>, alpha: f64, n_samples: usize, seed: u64) -> Result<McEstimate> {
    let b = b.unwrap_or(a);
    check(a, b, alpha, n_samples)?;
    let ball = b.bounding_ball();
    Ok(accumulate(n_samples, seed, |u| sample_value(a, b, ball, alpha, u)))
}

/// `V(F) − V(E)` from paired samples (common random numbers).
pub fn mc_riesz_difference(e: &dyn Region, f: &dyn Region, alpha: f64, n_samples: usize, seed: u64) -> Result<McEstimate> {
    check(e, f, alpha, n_samples)?;
    let (be, bf) = (e.bounding_ball(), f.bounding_ball());
    Ok(accumulate(n_samples, seed, |u| {
        sample_value(f, f, bf, alpha, u) - sample_value(e, e, be, alpha, u)
    }))
}
