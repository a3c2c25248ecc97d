//! Riesz potential `v_Ω(x) = ∫_Ω |x−y|^{−α} dy` as a boundary integral.
//!
//! `div_y((y−x)|y−x|^{−α}) = (d−α)|y−x|^{−α}` gives
//! `v_Ω(x) = 1/(d−α) ∮ (y−x)·n_y |y−x|^{−α} dS_y`, whose integrand stays
//! bounded when `x` lies on the boundary (`α ≤ 2`). On the circle the
//! boundary is resampled from the trigonometric interpolant of the radii.

use std::f64::consts::PI;

use super::sum::neumaier;
use crate::geometry::vec3::{self, Vec3};
use crate::geometry::{Configuration, StarShape};
use crate::{Error, Result};

const UPSAMPLE: usize = 16;

/// Boundary nodes and area vectors used for potential evaluation.
#[derive(Clone, Debug)]
pub struct PotentialSurface {
    x: Vec<Vec3>,
    n: Vec<Vec3>,
    scale: f64,
}

impl PotentialSurface {
    pub fn new(shape: &StarShape) -> Self {
        let (x, n) = match shape.dim() {
            2 => upsampled_circle(shape),
            _ => {
                let b = super::riesz::Boundary::of(shape);
                (b.x, b.n)
            }
        };
        PotentialSurface {
            x,
            n,
            scale: shape.max_radius(),
        }
    }

    pub fn eval(&self, x: Vec3, alpha: f64, d: usize) -> f64 {
        let tiny = 1e-13 * self.scale;
        let terms = self.x.iter().zip(&self.n).filter_map(|(y, n)| {
            let z = vec3::sub(*y, x);
            let r2 = vec3::norm2(z);
            (r2 > tiny * tiny).then(|| vec3::dot(z, *n) * r2.powf(-0.5 * alpha))
        });
        neumaier(terms) / (d as f64 - alpha)
    }
}

fn upsampled_circle(shape: &StarShape) -> (Vec<Vec3>, Vec<Vec3>) {
    let r = shape.radii();
    let n = r.len();
    let dt = 2.0 * PI / n as f64;
    let kmax = n / 2;
    // real Fourier coefficients: r(θ) = a_0 + Σ a_k cos kθ + b_k sin kθ
    let mut a = vec![0.0; kmax + 1];
    let mut b = vec![0.0; kmax + 1];
    for k in 0..=kmax {
        let (mut sa, mut sb) = (0.0, 0.0);
        for (j, &rj) in r.iter().enumerate() {
            let (s, c) = (k as f64 * dt * j as f64).sin_cos();
            sa += rj * c;
            sb += rj * s;
        }
        let f = if k == 0 || (n % 2 == 0 && k == kmax) { 1.0 } else { 2.0 };
        a[k] = f * sa / n as f64;
        b[k] = if n % 2 == 0 && k == kmax { 0.0 } else { f * sb / n as f64 };
    }
    let m = UPSAMPLE * n;
    let dtf = 2.0 * PI / m as f64;
    let c = shape.center3();
    let mut xs = Vec::with_capacity(m);
    let mut ns = Vec::with_capacity(m);
    for i in 0..m {
        let t = dtf * i as f64;
        let (mut rv, mut dv) = (a[0], 0.0);
        for k in 1..=kmax {
            let (s, co) = (k as f64 * t).sin_cos();
            rv += a[k] * co + b[k] * s;
            dv += k as f64 * (b[k] * co - a[k] * s);
        }
        let th = [t.cos(), t.sin(), 0.0];
        let tau = [-t.sin(), t.cos(), 0.0];
        xs.push(vec3::add(c, vec3::scale(th, rv)));
        ns.push(vec3::scale(vec3::sub(vec3::scale(th, rv), vec3::scale(tau, dv)), dtf));
    }
    (xs, ns)
}

fn check_alpha(d: usize, alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha < d as f64) {
        return Err(Error::InvalidParameter {
            name: "alpha",
            value: alpha,
            constraint: "must lie in (0, d)",
        });
    }
    Ok(())
}

/// `v_Ω(x)` for a single component.
pub fn potential_shape(shape: &StarShape, x: &[f64], alpha: f64) -> Result<f64> {
    check_alpha(shape.dim(), alpha)?;
    Ok(PotentialSurface::new(shape).eval(vec3::from_slice(x), alpha, shape.dim()))
}

/// `v_Ω(x)` for a configuration (sum over components).
pub fn potential(config: &Configuration, x: &[f64], alpha: f64) -> Result<f64> {
    let Some(d) = config.dim() else {
        return Ok(0.0);
    };
    check_alpha(d, alpha)?;
    let x = vec3::from_slice(x);
    Ok(neumaier(
        config
            .components()
            .iter()
            .map(|s| PotentialSurface::new(s).eval(x, alpha, d)),
    ))
}

/// Continuous shape derivative `∂V/∂r_j ≈ 2 v_Ω(x_j) w_j r_j^{d−1}` of the
/// Riesz energy, evaluated from the boundary potential.
pub fn riesz_boundary_derivative(config: &Configuration, alpha: f64) -> Result<Vec<Vec<f64>>> {
    let Some(d) = config.dim() else {
        return Ok(Vec::new());
    };
    check_alpha(d, alpha)?;
    let surfaces: Vec<PotentialSurface> =
        config.components().iter().map(PotentialSurface::new).collect();
    Ok(config
        .components()
        .iter()
        .map(|s| {
            let grid = s.grid();
            (0..grid.len())
                .map(|j| {
                    let x = s.boundary_point(j);
                    let v: f64 = surfaces.iter().map(|p| p.eval(x, alpha, d)).sum();
                    2.0 * v * grid.weights()[j] * s.radii()[j].powi(d as i32 - 1)
                })
                .collect()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_ball, make_grid};
    use std::sync::Arc;

    #[test]
    fn center_of_disk() {
        let g = Arc::new(make_grid(2, 64).unwrap());
        let b = make_ball(1.0, &[0.0, 0.0], g).unwrap();
        assert!((potential_shape(&b, &[0.0, 0.0], 1.0).unwrap() - 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn far_field() {
        let g = Arc::new(make_grid(3, 12).unwrap());
        let b = make_ball(1.0, &[0.0; 3], g).unwrap();
        let x = 1e4;
        let v = potential_shape(&b, &[x, 0.0, 0.0], 1.5).unwrap();
        assert!((v * x.powf(1.5) / (4.0 * PI / 3.0) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn boundary_of_disk() {
        // v_{B_1} on the unit circle, α = 1: ∫_0^{2π}∫_0^{...} closed form 4
        let g = Arc::new(make_grid(2, 128).unwrap());
        let b = make_ball(1.0, &[0.0, 0.0], g).unwrap();
        let v = potential_shape(&b, &[1.0, 0.0], 1.0).unwrap();
        assert!((v - 4.0).abs() < 1e-3, "{v}");
    }
}
