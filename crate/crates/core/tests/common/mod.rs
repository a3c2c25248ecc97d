//! Helpers shared by the integration tests and the acceptance harness.

#![allow(dead_code)]

use std::f64::consts::PI;
use std::sync::Arc;

use isoshape::energy::evaluate;
use isoshape::geometry::{Configuration, EnergyParams, SphereGrid, StarShape};
use isoshape::optimize::shape_gradient;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Central-difference step used by the gradient checks.
pub const FD_STEP: f64 = 1e-5;

/// Coordinates whose finite difference is below this fraction of the largest
/// one are compared against that fraction instead of their own magnitude.
pub const FD_FLOOR: f64 = 1e-3;

/// `r = scale · exp(Σ a_k Y_k)` with a few random low modes of amplitude
/// below `amp`.
pub fn random_shape(grid: &Arc<SphereGrid>, center: &[f64], scale: f64, amp: f64, rng: &mut ChaCha8Rng) -> StarShape {
    let d = grid.dim();
    let terms: Vec<(f64, [f64; 3], f64)> = (0..4)
        .map(|k| {
            let a = amp * (2.0 * rng.gen::<f64>() - 1.0) / (k + 1) as f64;
            let z: f64 = 2.0 * rng.gen::<f64>() - 1.0;
            let t = 2.0 * PI * rng.gen::<f64>();
            let s = (1.0 - z * z).sqrt();
            let dir = if d == 2 { [t.cos(), t.sin(), 0.0] } else { [s * t.cos(), s * t.sin(), z] };
            (a, dir, (k + 1) as f64)
        })
        .collect();
    let r = grid
        .nodes()
        .iter()
        .map(|x| {
            let s: f64 = terms
                .iter()
                .map(|(a, e, k)| {
                    let c = x[0] * e[0] + x[1] * e[1] + x[2] * e[2];
                    a * (k * c.clamp(-1.0, 1.0).acos()).cos()
                })
                .sum();
            scale * s.exp()
        })
        .collect();
    StarShape::new(grid.clone(), center, r).unwrap()
}

/// Largest per-coordinate relative error between `shape_gradient` and
/// central differences of the total energy.
pub fn gradient_error(cfg: &Configuration, params: &EnergyParams) -> f64 {
    let grad = shape_gradient(cfg, params).unwrap();
    let energy = |c: &Configuration| evaluate(c, params).unwrap().total;
    let mut pairs = Vec::new();
    for (ci, s) in cfg.components().iter().enumerate() {
        let d = s.dim();
        let with = |shape: StarShape| {
            let mut comps = cfg.components().to_vec();
            comps[ci] = shape;
            Configuration::new(comps).unwrap()
        };
        for j in 0..s.radii().len() {
            let bump = |h: f64| {
                let mut r = s.radii().to_vec();
                r[j] += h;
                with(StarShape::new(s.grid().clone(), s.center(), r).unwrap())
            };
            let fd = (energy(&bump(FD_STEP)) - energy(&bump(-FD_STEP))) / (2.0 * FD_STEP);
            pairs.push((grad[ci].dr[j], fd));
        }
        for axis in 0..d {
            let shift = |h: f64| {
                let mut off = vec![0.0; d];
                off[axis] = h;
                with(s.translate(&off))
            };
            let fd = (energy(&shift(FD_STEP)) - energy(&shift(-FD_STEP))) / (2.0 * FD_STEP);
            pairs.push((grad[ci].dc[axis], fd));
        }
    }
    let scale = pairs.iter().map(|(_, f)| f.abs()).fold(0.0, f64::max);
    pairs
        .iter()
        .map(|(g, f)| (g - f).abs() / f.abs().max(FD_FLOOR * scale))
        .fold(0.0, f64::max)
}
