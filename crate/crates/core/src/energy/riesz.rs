//! Riesz energies by a double boundary integral.
//!
//! With `G(z) = |z|^β / β`, `β = 2 − α`, one has `Δ G = (d − α)|z|^{−α}`, so
//! two applications of the divergence theorem give
//!
//! `V(Ω) = −1/((d−α)(2−α)) ∮∮ |x−y|^{2−α} n_x·n_y`
//!
//! whose kernel is bounded for `α ≤ 2`. Discretely the area vector at node
//! `j` is `N_j = w_j (r_j^{d−1} θ_j − r_j^{d−2} ∇_τ r_j)`. On the circle the
//! diagonal of the product rule is replaced by the generalized
//! Euler–Maclaurin term `−2ζ(−β) |N_j|^{β+2}`, leaving an `O(Δ^{5−α})`
//! error. On the sphere the diagonal is the lattice analogue
//! `−Z_a(−β/2) |N_j|^{2+β/2}` with `Z_a` the Epstein zeta of the local
//! polar × azimuthal cell. At `α = 2` (`d = 3` only) the kernel is
//! `log|z|` with prefactor `−1/(d−α)`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sum::neumaier;
use super::epstein::{epstein_rect, epstein_rect_derivative_at_zero};
use super::zeta::zeta;
use crate::geometry::vec3::{self, Vec3};
use crate::geometry::{Configuration, SphereGrid, StarShape};
use crate::{Error, Result};

/// A quadrature value with its estimated absolute error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RieszValue {
    pub value: f64,
    /// `None` when no coarse sub-grid exists (odd azimuthal count).
    pub error: Option<f64>,
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct Kernel {
    d: usize,
    beta: f64,
    kappa: f64,
    log: bool,
}

impl Kernel {
    pub(crate) fn new(d: usize, alpha: f64) -> Result<Self> {
        if d != 2 && d != 3 {
            return Err(Error::UnsupportedDimension(d));
        }
        if !(alpha > 0.0 && alpha < d as f64) {
            return Err(Error::InvalidParameter {
                name: "alpha",
                value: alpha,
                constraint: "must lie in (0, d)",
            });
        }
        let beta = 2.0 - alpha;
        let log = beta == 0.0;
        let kappa = if log {
            -1.0 / (d as f64 - alpha)
        } else {
            -1.0 / ((d as f64 - alpha) * beta)
        };
        Ok(Kernel { d, beta, kappa, log })
    }

    #[inline]
    fn g(&self, r2: f64) -> f64 {
        if self.log {
            0.5 * r2.ln()
        } else {
            r2.powf(0.5 * self.beta)
        }
    }

    /// Returns `G` and the factor `k` with `∇G(z) = k z`.
    #[inline]
    fn g_and_grad(&self, r2: f64) -> (f64, f64) {
        if self.log {
            (0.5 * r2.ln(), 1.0 / r2)
        } else {
            let gb = r2.powf(0.5 * self.beta);
            (gb, self.beta * gb / r2)
        }
    }

    /// Exponent `e` of the power-law diagonal `c |N|^e`.
    fn diagonal_exponent(&self) -> f64 {
        2.0 + self.beta / (self.d - 1) as f64
    }

    /// Per-node coefficients of the omitted-diagonal correction.
    ///
    /// On the circle this is `−2ζ(−β)`. On the sphere each node is treated
    /// as a point of the rectangular lattice spanned by its polar and
    /// azimuthal spacings, whose Epstein zeta gives `−Z_a(−β/2)`, or
    /// `Z_a'(0)` for the logarithm. `azimuth_factor` widens the azimuthal
    /// spacing for coarse sub-grids.
    fn diagonal_coefficients(&self, grid: &SphereGrid, azimuth_factor: f64) -> Vec<f64> {
        if self.d == 2 {
            return vec![-2.0 * zeta(-self.beta); grid.len()];
        }
        let na = grid.azimuth_count();
        let dl = 2.0 * PI / na as f64;
        let mut out = Vec::with_capacity(grid.len());
        for (i, &theta) in grid.polar_angles().iter().enumerate() {
            let sin = theta.sin();
            let polar_step = grid.weights()[i * na] / (dl * sin);
            let aspect = (polar_step / (azimuth_factor * dl * sin)).sqrt();
            let c = if self.log {
                epstein_rect_derivative_at_zero(aspect)
            } else {
                -epstein_rect(aspect, -0.5 * self.beta)
            };
            out.extend(std::iter::repeat_n(c, na));
        }
        out
    }

    #[inline]
    fn diagonal(&self, n: Vec3, c: f64) -> f64 {
        let m2 = vec3::norm2(n);
        if self.log {
            0.5 * m2 * (c + 0.5 * m2.ln())
        } else {
            c * m2.powf(0.5 * self.diagonal_exponent())
        }
    }

    /// `∂/∂N` of [`Kernel::diagonal`].
    #[inline]
    fn diagonal_grad(&self, n: Vec3, c: f64) -> Vec3 {
        let m2 = vec3::norm2(n);
        let f = if self.log {
            c + 0.5 * m2.ln() + 0.5
        } else {
            let e = self.diagonal_exponent();
            c * e * m2.powf(0.5 * (e - 2.0))
        };
        vec3::scale(n, f)
    }

    /// Divisor turning the fine-minus-coarse difference into an error
    /// estimate. The sphere's sub-grid coarsens the azimuth only, so no
    /// Richardson factor applies there and twice the difference is used,
    /// which bounds the error on balls for every `α` checked.
    fn richardson_divisor(&self) -> f64 {
        if self.d == 2 {
            2f64.powf(3.0 + self.beta) - 1.0
        } else {
            0.5
        }
    }
}

/// Boundary points and area vectors of one component.
#[derive(Clone, Debug)]
pub(crate) struct Boundary {
    pub x: Vec<Vec3>,
    pub n: Vec<Vec3>,
    pub g: Vec<Vec3>,
    /// Diagonal correction coefficients; empty unless built by [`Boundary::with_diagonal`].
    pub c: Vec<f64>,
}

impl Boundary {
    pub(crate) fn of(shape: &StarShape) -> Self {
        let grid = shape.grid();
        let d = shape.dim() as i32;
        let g = grid.stencil().apply(shape.radii());
        let c = shape.center3();
        let mut x = Vec::with_capacity(grid.len());
        let mut n = Vec::with_capacity(grid.len());
        for (((th, &r), gj), &w) in grid.nodes().iter().zip(shape.radii()).zip(&g).zip(grid.weights()) {
            x.push(vec3::add(c, vec3::scale(*th, r)));
            n.push(vec3::scale(
                vec3::sub(vec3::scale(*th, r.powi(d - 1)), vec3::scale(*gj, r.powi(d - 2))),
                w,
            ));
        }
        Boundary { x, n, g, c: Vec::new() }
    }

    fn with_diagonal(shape: &StarShape, k: &Kernel) -> Self {
        let mut b = Self::of(shape);
        b.c = k.diagonal_coefficients(shape.grid(), 1.0);
        b
    }

    /// Every other azimuthal node, with doubled weights.
    fn coarse(&self, shape: &StarShape, k: &Kernel) -> Option<Boundary> {
        let (idx, factor) = shape.grid().coarse_subset()?;
        let c = k.diagonal_coefficients(shape.grid(), factor);
        Some(Boundary {
            x: idx.iter().map(|&i| self.x[i]).collect(),
            n: idx.iter().map(|&i| vec3::scale(self.n[i], factor)).collect(),
            g: idx.iter().map(|&i| self.g[i]).collect(),
            c: idx.iter().map(|&i| c[i]).collect(),
        })
    }
}

fn self_sum(k: &Kernel, b: &Boundary) -> f64 {
    let rows: Vec<f64> = (0..b.x.len())
        .into_par_iter()
        .map(|i| {
            let (xi, ni) = (b.x[i], b.n[i]);
            let mut s = k.diagonal(ni, b.c[i]);
            for j in 0..b.x.len() {
                if j != i {
                    s += k.g(vec3::norm2(vec3::sub(xi, b.x[j]))) * vec3::dot(ni, b.n[j]);
                }
            }
            s
        })
        .collect();
    k.kappa * neumaier(rows)
}

fn cross_sum(k: &Kernel, a: &Boundary, b: &Boundary) -> f64 {
    let rows: Vec<f64> = (0..a.x.len())
        .into_par_iter()
        .map(|i| {
            let (xi, ni) = (a.x[i], a.n[i]);
            let mut s = 0.0;
            for j in 0..b.x.len() {
                s += k.g(vec3::norm2(vec3::sub(xi, b.x[j]))) * vec3::dot(ni, b.n[j]);
            }
            s
        })
        .collect();
    k.kappa * neumaier(rows)
}

/// `V(Ω)` for one component, with a resolution-halving error estimate.
pub fn riesz_self(shape: &StarShape, alpha: f64) -> Result<RieszValue> {
    let k = Kernel::new(shape.dim(), alpha)?;
    let b = Boundary::with_diagonal(shape, &k);
    let value = self_sum(&k, &b);
    let error = b
        .coarse(shape, &k)
        .map(|c| (value - self_sum(&k, &c)).abs() / k.richardson_divisor());
    Ok(RieszValue { value, error })
}

/// `I(A, B) = ∫_A ∫_B |x−y|^{−α}` for disjoint components.
///
/// Both enumeration orders are summed, so the result is symmetric in its
/// arguments bit for bit.
pub fn interaction(a: &StarShape, b: &StarShape, alpha: f64) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::GridMismatch);
    }
    Configuration::new(vec![a.clone(), b.clone()]).map_err(|_| Error::OverlapDetected {
        first: 0,
        second: 1,
    })?;
    let k = Kernel::new(a.dim(), alpha)?;
    Ok(interaction_unchecked(&k, &Boundary::of(a), &Boundary::of(b)))
}

fn interaction_unchecked(k: &Kernel, a: &Boundary, b: &Boundary) -> f64 {
    0.5 * (cross_sum(k, a, b) + cross_sum(k, b, a))
}

/// `V` of a configuration as `Σ V(Ω_i) + 2 Σ_{i<j} I(Ω_i, Ω_j)`.
pub fn riesz_config(config: &Configuration, alpha: f64) -> Result<RieszValue> {
    riesz_config_impl(config, alpha, true)
}

/// As [`riesz_config`] without the coarse-grid error estimate.
pub(crate) fn riesz_config_value(config: &Configuration, alpha: f64) -> Result<f64> {
    Ok(riesz_config_impl(config, alpha, false)?.value)
}

fn riesz_config_impl(config: &Configuration, alpha: f64, estimate: bool) -> Result<RieszValue> {
    let Some(d) = config.dim() else {
        return Ok(RieszValue {
            value: 0.0,
            error: Some(0.0),
        });
    };
    let k = Kernel::new(d, alpha)?;
    let comps = config.components();
    let bounds: Vec<Boundary> = comps.iter().map(|s| Boundary::with_diagonal(s, &k)).collect();
    let mut terms = Vec::new();
    let mut error = estimate.then_some(0.0);
    for (i, (s, b)) in comps.iter().zip(&bounds).enumerate() {
        let v = self_sum(&k, b);
        terms.push(v);
        if let Some(e) = error {
            error = b
                .coarse(s, &k)
                .map(|c| e + (v - self_sum(&k, &c)).abs() / k.richardson_divisor());
        }
        for bj in &bounds[i + 1..] {
            terms.push(2.0 * interaction_unchecked(&k, b, bj));
        }
    }
    Ok(RieszValue {
        value: neumaier(terms),
        error,
    })
}

/// Derivative of a component's discrete energy contributions.
#[derive(Clone, Debug, PartialEq)]
pub struct ComponentGradient {
    /// `∂/∂r_j` per grid node.
    pub dr: Vec<f64>,
    /// `∂/∂c` (length-3, zero third entry in the plane).
    pub dc: Vec3,
}

/// Exact gradient of the discrete configuration energy `riesz_config`.
pub fn riesz_gradient(config: &Configuration, alpha: f64) -> Result<Vec<ComponentGradient>> {
    let Some(d) = config.dim() else {
        return Ok(Vec::new());
    };
    let k = Kernel::new(d, alpha)?;
    let comps = config.components();
    let bounds: Vec<Boundary> = comps.iter().map(|s| Boundary::with_diagonal(s, &k)).collect();
    let xs: Vec<Vec3> = bounds.iter().flat_map(|b| b.x.iter().copied()).collect();
    let ns: Vec<Vec3> = bounds.iter().flat_map(|b| b.n.iter().copied()).collect();
    let cs: Vec<f64> = bounds.iter().flat_map(|b| b.c.iter().copied()).collect();
    // B_i = ∂V/∂X_i, A_i = ∂V/∂N_i
    let ab: Vec<(Vec3, Vec3)> = (0..xs.len())
        .into_par_iter()
        .map(|i| {
            let (xi, ni) = (xs[i], ns[i]);
            let mut bsum = vec3::ZERO;
            let mut asum = vec3::ZERO;
            for j in 0..xs.len() {
                if j == i {
                    continue;
                }
                let z = vec3::sub(xi, xs[j]);
                let (g, kg) = k.g_and_grad(vec3::norm2(z));
                vec3::axpy(&mut bsum, kg * vec3::dot(ni, ns[j]), z);
                vec3::axpy(&mut asum, g, ns[j]);
            }
            let mut a = vec3::scale(asum, 2.0 * k.kappa);
            vec3::axpy(&mut a, k.kappa, k.diagonal_grad(ni, cs[i]));
            (vec3::scale(bsum, 2.0 * k.kappa), a)
        })
        .collect();

    let mut out = Vec::with_capacity(comps.len());
    let mut offset = 0;
    for (shape, b) in comps.iter().zip(&bounds) {
        let grid = shape.grid();
        let len = grid.len();
        let di = d as i32;
        let mut dr = Vec::with_capacity(len);
        let mut h = Vec::with_capacity(len);
        let mut dc = vec3::ZERO;
        for j in 0..len {
            let (bj, aj) = ab[offset + j];
            let th = grid.nodes()[j];
            let r = shape.radii()[j];
            let w = grid.weights()[j];
            let dn = vec3::sub(
                vec3::scale(th, (d - 1) as f64 * r.powi(di - 2)),
                vec3::scale(b.g[j], (d - 2) as f64 * r.powi(di - 3)),
            );
            dr.push(vec3::dot(th, bj) + w * vec3::dot(aj, dn));
            h.push(vec3::scale(aj, -w * r.powi(di - 2)));
            dc = vec3::add(dc, bj);
        }
        for (o, t) in dr.iter_mut().zip(grid.stencil().apply_transpose(&h)) {
            *o += t;
        }
        out.push(ComponentGradient { dr, dc });
        offset += len;
    }
    Ok(out)
}
