//! Volume quadrature with a desingularized kernel, used as an independent
//! cross-check of the boundary-integral Riesz energies.
//!
//! Nodes `c + s_k r_j θ_j` carry weights `s_k^{d−1} r_j^d w_j v_k`; the kernel
//! `(|x−y|² + h²)^{−α/2}` is summed over all pairs at `h` and `h/2` and
//! extrapolated assuming an `O(h^{d−α})` leading error.

use rayon::prelude::*;

use super::riesz::RieszValue;
use super::sum::neumaier;
use crate::geometry::vec3::{self, Vec3};
use crate::geometry::{gauss_legendre_unit, Configuration, StarShape};
use crate::{Error, Result};

/// Default `h₀` in units of the nominal node spacing `(|Ω|/#nodes)^{1/d}`.
pub const DEFAULT_H_FACTOR: f64 = 2.0;

#[derive(Clone, Debug)]
pub struct VolumeQuadrature {
    d: usize,
    nodes: Vec<Vec3>,
    weights: Vec<f64>,
    h: f64,
}

impl VolumeQuadrature {
    /// Product rule over the shape with `⌈n/2⌉` radial Gauss nodes.
    pub fn new(shape: &StarShape) -> Self {
        Self::from_configuration(&Configuration::single(shape.clone()))
    }

    pub fn from_configuration(config: &Configuration) -> Self {
        let d = config.dim().unwrap_or(2);
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for shape in config.components() {
            let grid = shape.grid();
            let (s, v) = gauss_legendre_unit(grid.resolution().div_ceil(2));
            let c = shape.center3();
            for ((th, &r), &w) in grid.nodes().iter().zip(shape.radii()).zip(grid.weights()) {
                for (&sk, &vk) in s.iter().zip(&v) {
                    nodes.push(vec3::add(c, vec3::scale(*th, sk * r)));
                    weights.push(sk.powi(d as i32 - 1) * r.powi(d as i32) * w * vk);
                }
            }
        }
        let total: f64 = weights.iter().sum();
        let spacing = if nodes.is_empty() {
            1.0
        } else {
            (total / nodes.len() as f64).powf(1.0 / d as f64)
        };
        VolumeQuadrature {
            d,
            nodes,
            weights,
            h: DEFAULT_H_FACTOR * spacing,
        }
    }

    pub fn with_h(mut self, h: f64) -> Result<Self> {
        if !(h > 0.0) {
            return Err(Error::InvalidParameter {
                name: "h",
                value: h,
                constraint: "desingularization length must be positive",
            });
        }
        self.h = h;
        Ok(self)
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn nodes(&self) -> &[Vec3] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total_weight(&self) -> f64 {
        neumaier(self.weights.iter().copied())
    }

    /// `Σ_i Σ_j w_i w_j (|x_i−x_j|² + h²)^{−α/2}` over all pairs.
    pub fn desingularized_sum(&self, alpha: f64, h: f64) -> f64 {
        let h2 = h * h;
        let e = -0.5 * alpha;
        let rows: Vec<f64> = (0..self.nodes.len())
            .into_par_iter()
            .map(|i| {
                let xi = self.nodes[i];
                let mut s = 0.0;
                for (xj, wj) in self.nodes.iter().zip(&self.weights) {
                    s += wj * (vec3::norm2(vec3::sub(xi, *xj)) + h2).powf(e);
                }
                self.weights[i] * s
            })
            .collect();
        neumaier(rows)
    }

    /// Richardson extrapolation over `{h, h/2}`; the error is the size of
    /// the extrapolation step. Fails when it exceeds `tolerance·|V|`.
    pub fn riesz(&self, alpha: f64, tolerance: Option<f64>) -> Result<RieszValue> {
        if !(alpha > 0.0 && alpha < self.d as f64) {
            return Err(Error::InvalidParameter {
                name: "alpha",
                value: alpha,
                constraint: "must lie in (0, d)",
            });
        }
        let coarse = self.desingularized_sum(alpha, self.h);
        let fine = self.desingularized_sum(alpha, 0.5 * self.h);
        let f = 2f64.powf(self.d as f64 - alpha);
        let value = (f * fine - coarse) / (f - 1.0);
        let error = (value - fine).abs();
        if let Some(tol) = tolerance {
            if error > tol * value.abs() {
                return Err(Error::ExtrapolationUnstable {
                    estimate: error,
                    tolerance: tol * value.abs(),
                });
            }
        }
        Ok(RieszValue {
            value,
            error: Some(error),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_ball, make_grid};
    use std::f64::consts::PI;
    use std::sync::Arc;

    #[test]
    fn weights_sum_to_volume() {
        let g = Arc::new(make_grid(2, 32).unwrap());
        let r: Vec<f64> = g.nodes().iter().map(|x| 1.0 + 0.3 * x[0]).collect();
        let s = StarShape::new(g, &[0.5, 0.0], r).unwrap();
        let q = VolumeQuadrature::new(&s);
        assert!((q.total_weight() / s.volume() - 1.0).abs() < 1e-12);
        assert!(q.weights().iter().all(|&w| w > 0.0));
    }

    #[test]
    fn disk_cross_check() {
        let g = Arc::new(make_grid(2, 64).unwrap());
        let b = make_ball(1.0, &[0.0, 0.0], g).unwrap();
        let v = VolumeQuadrature::new(&b).riesz(1.0, None).unwrap();
        assert!((v.value / (16.0 * PI / 3.0) - 1.0).abs() < 2e-3, "{v:?}");
    }
}
