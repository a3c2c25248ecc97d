//! Off-grid evaluation of the radial function by local Lagrange
//! interpolation: periodic 4-point in angle on the circle; on the sphere,
//! 4-point along the meridian (continued across the poles) of 4-point
//! azimuthal interpolants.

use std::f64::consts::PI;

use super::shape::{Configuration, StarShape};
use super::vec3::{self, Vec3};
use super::GridKind;

/// Periodic cubic Lagrange interpolation of uniform samples at position `s`
/// (in units of the sample spacing).
fn periodic_cubic(values: &[f64], s: f64) -> f64 {
    let n = values.len() as isize;
    let i = s.floor();
    let t = s - i;
    let i = i as isize;
    let at = |o: isize| values[(i + o).rem_euclid(n) as usize];
    let (a, b, c, d) = (at(-1), at(0), at(1), at(2));
    // nodes -1, 0, 1, 2
    -a * t * (t - 1.0) * (t - 2.0) / 6.0 + b * (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0
        - c * (t + 1.0) * t * (t - 2.0) / 2.0
        + d * (t + 1.0) * t * (t - 1.0) / 6.0
}

fn lagrange(xs: &[f64; 4], ys: &[f64; 4], x: f64) -> f64 {
    let mut total = 0.0;
    for i in 0..4 {
        let mut l = 1.0;
        for j in 0..4 {
            if i != j {
                l *= (x - xs[j]) / (xs[i] - xs[j]);
            }
        }
        total += ys[i] * l;
    }
    total
}

impl StarShape {
    /// Interpolated radius in the unit direction `dir` (from the center).
    pub fn radius_at(&self, dir: Vec3) -> f64 {
        let grid = self.grid();
        let radii = self.radii();
        let value = match grid.kind() {
            GridKind::UniformAngle => {
                let n = grid.len();
                let t = dir[1].atan2(dir[0]).rem_euclid(2.0 * PI);
                periodic_cubic(radii, t * n as f64 / (2.0 * PI))
            }
            GridKind::GaussLatlong => {
                let polar = grid.polar_angles();
                let nr = polar.len();
                let na = grid.azimuth_count();
                let phi = dir[2].clamp(-1.0, 1.0).acos();
                let lam = dir[1].atan2(dir[0]).rem_euclid(2.0 * PI);
                let ring = |i: usize, shifted: bool| {
                    let l = if shifted { lam + PI } else { lam };
                    periodic_cubic(&radii[i * na..(i + 1) * na], l * na as f64 / (2.0 * PI))
                };
                // meridian index q: q < 0 and q >= nr continue across the poles
                let point = |q: isize| -> (f64, f64) {
                    if q < 0 {
                        let i = (-1 - q) as usize;
                        (-polar[i], ring(i, true))
                    } else if q as usize >= nr {
                        let i = 2 * nr - 1 - q as usize;
                        (2.0 * PI - polar[i], ring(i, true))
                    } else {
                        (polar[q as usize], ring(q as usize, false))
                    }
                };
                let below = polar.iter().take_while(|&&p| p <= phi).count() as isize - 1;
                let mut xs = [0.0; 4];
                let mut ys = [0.0; 4];
                for (k, q) in (below - 1..=below + 2).enumerate() {
                    let (x, y) = point(q);
                    xs[k] = x;
                    ys[k] = y;
                }
                lagrange(&xs, &ys, phi)
            }
        };
        value.max(self.floor())
    }

    /// Whether `x` lies in the closed set bounded by the interpolated radius.
    pub fn contains(&self, x: Vec3) -> bool {
        let rel = vec3::sub(x, self.center3());
        let dist = vec3::norm(rel);
        if dist == 0.0 {
            return true;
        }
        if dist > 2.0 * self.max_radius() {
            return false;
        }
        dist <= self.radius_at(vec3::scale(rel, 1.0 / dist))
    }
}

impl Configuration {
    /// Membership in the union of the components.
    pub fn contains(&self, x: Vec3) -> bool {
        self.components().iter().any(|c| c.contains(x))
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use crate::geometry::{make_grid, StarShape};

    fn shape(d: usize, n: usize, f: impl Fn([f64; 3]) -> f64) -> StarShape {
        let g = Arc::new(make_grid(d, n).unwrap());
        let radii = g.nodes().iter().map(|&t| f(t)).collect();
        StarShape::new(g, &vec![0.0; d], radii).unwrap()
    }

    #[test]
    fn circle_interpolation_is_accurate() {
        let f = |t: [f64; 3]| 1.0 + 0.2 * (3.0 * t[1].atan2(t[0])).cos();
        let s = shape(2, 128, f);
        for k in 0..50 {
            let a = 0.1237 * k as f64;
            let dir = [a.cos(), a.sin(), 0.0];
            assert!((s.radius_at(dir) - f(dir)).abs() < 1e-5);
        }
    }

    #[test]
    fn sphere_interpolation_is_accurate() {
        let f = |t: [f64; 3]| 1.0 + 0.2 * t[2] * t[2] + 0.1 * t[0] * t[1];
        let s = shape(3, 32, f);
        for k in 0..200 {
            let z = -1.0 + 2.0 * (k as f64 + 0.5) / 200.0;
            let l = 2.399963 * k as f64;
            let rho = (1.0 - z * z).sqrt();
            let dir = [rho * l.cos(), rho * l.sin(), z];
            assert!((s.radius_at(dir) - f(dir)).abs() < 1e-4, "z {z}: {} vs {}", s.radius_at(dir), f(dir));
        }
        assert!(s.contains([0.0, 0.0, 1.15]));
        assert!(!s.contains([0.0, 0.0, 1.25]));
    }
}
