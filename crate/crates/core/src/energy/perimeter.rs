//! Weighted perimeter `P_a = ∫ a(c + rθ) r^{d-1} √(1 + |∇_τ r|²/r²) dσ`.

use super::sum::neumaier;
use crate::geometry::vec3::{self, Vec3};
use crate::geometry::StarShape;

/// Density `a(x) = |x|^p`; `p = 0` gives `a ≡ 1` including at the origin.
#[inline]
pub fn density(x: Vec3, p: f64) -> f64 {
    if p == 0.0 {
        1.0
    } else {
        vec3::norm(x).powf(p)
    }
}

/// `∇a(x) = p |x|^{p-2} x`, taken as zero at the origin.
#[inline]
pub fn density_gradient(x: Vec3, p: f64) -> Vec3 {
    let r = vec3::norm(x);
    if p == 0.0 || r == 0.0 {
        vec3::ZERO
    } else {
        vec3::scale(x, p * r.powf(p - 2.0))
    }
}

struct Local {
    x: Vec3,
    r: f64,
    g: Vec3,
    s: f64,
}

fn locals(shape: &StarShape) -> Vec<Local> {
    let grid = shape.grid();
    let g = grid.stencil().apply(shape.radii());
    let c = shape.center3();
    grid.nodes()
        .iter()
        .zip(shape.radii())
        .zip(g)
        .map(|((th, &r), g)| Local {
            x: vec3::add(c, vec3::scale(*th, r)),
            r,
            g,
            s: (1.0 + vec3::norm2(g) / (r * r)).sqrt(),
        })
        .collect()
}

pub fn weighted_perimeter(shape: &StarShape, p: f64) -> f64 {
    let d = shape.dim() as i32;
    let w = shape.grid().weights();
    neumaier(
        locals(shape)
            .iter()
            .zip(w)
            .map(|(l, w)| w * density(l.x, p) * l.r.powi(d - 1) * l.s),
    )
}

/// Exact derivative of the discrete perimeter sum with respect to the
/// radial samples and the center.
pub fn perimeter_gradient(shape: &StarShape, p: f64) -> (Vec<f64>, Vec3) {
    let d = shape.dim() as i32;
    let grid = shape.grid();
    let w = grid.weights();
    let loc = locals(shape);
    let mut dr = Vec::with_capacity(loc.len());
    let mut h = Vec::with_capacity(loc.len());
    let mut dc = vec3::ZERO;
    for ((l, th), &wj) in loc.iter().zip(grid.nodes()).zip(w) {
        let a = density(l.x, p);
        let ga = density_gradient(l.x, p);
        let rd1 = l.r.powi(d - 1);
        let g2 = vec3::norm2(l.g);
        dr.push(
            wj * (vec3::dot(ga, *th) * rd1 * l.s + a * (d - 1) as f64 * l.r.powi(d - 2) * l.s
                - a * rd1 * g2 / (l.r.powi(3) * l.s)),
        );
        h.push(vec3::scale(l.g, wj * a * l.r.powi(d - 3) / l.s));
        vec3::axpy(&mut dc, wj * rd1 * l.s, ga);
    }
    for (o, t) in dr.iter_mut().zip(grid.stencil().apply_transpose(&h)) {
        *o += t;
    }
    (dr, dc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_ball, make_grid, unit_volume_radius};
    use std::f64::consts::PI;
    use std::sync::Arc;

    #[test]
    fn ball_closed_form() {
        let g = Arc::new(make_grid(2, 64).unwrap());
        let b = make_ball(1.0, &[0.0, 0.0], g).unwrap();
        assert!((weighted_perimeter(&b, 0.0) - 2.0 * PI).abs() < 1e-12);
        let g = Arc::new(make_grid(3, 16).unwrap());
        let b = make_ball(2.0, &[0.0; 3], g).unwrap();
        let p = weighted_perimeter(&b, 1.0);
        assert!((p / (32.0 * PI) - 1.0).abs() < 1e-10, "{p}");
    }

    #[test]
    fn unit_ball_weighted_p1() {
        let g = Arc::new(make_grid(2, 32).unwrap());
        let b = make_ball(unit_volume_radius(2), &[0.0, 0.0], g).unwrap();
        assert!((weighted_perimeter(&b, 1.0) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn gradient_matches_differences() {
        let g = Arc::new(make_grid(2, 24).unwrap());
        let r: Vec<f64> = g.nodes().iter().map(|x| 1.0 + 0.2 * x[0] * x[1] + 0.1 * x[1]).collect();
        let s = StarShape::new(g, &[0.2, -0.1], r).unwrap();
        let (dr, dc) = perimeter_gradient(&s, 2.0);
        let h = 1e-6;
        for j in [0, 5, 13] {
            let mut rp = s.radii().to_vec();
            let mut rm = rp.clone();
            rp[j] += h;
            rm[j] -= h;
            let fp = weighted_perimeter(&s.with_clamped(s.center3(), rp), 2.0);
            let fm = weighted_perimeter(&s.with_clamped(s.center3(), rm), 2.0);
            assert!(((fp - fm) / (2.0 * h) - dr[j]).abs() < 1e-6);
        }
        let fp = weighted_perimeter(&s.translate(&[h, 0.0]), 2.0);
        let fm = weighted_perimeter(&s.translate(&[-h, 0.0]), 2.0);
        assert!(((fp - fm) / (2.0 * h) - dc[0]).abs() < 1e-6);
    }
}
