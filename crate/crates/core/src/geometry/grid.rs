//! Quadrature grids on the unit sphere `S^{d-1}`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::filter::BandFilter;
use super::gauss::gauss_legendre;
use super::vec3::{self, Vec3};
use crate::{Error, Result};

/// Smallest admissible resolution parameter.
pub const MIN_RESOLUTION: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridKind {
    /// `n` equispaced angles on the circle.
    UniformAngle,
    /// `n` Gauss–Legendre polar angles times `2n` equispaced azimuths.
    GaussLatlong,
}

impl GridKind {
    pub fn for_dimension(d: usize) -> Result<Self> {
        match d {
            2 => Ok(GridKind::UniformAngle),
            3 => Ok(GridKind::GaussLatlong),
            _ => Err(Error::UnsupportedDimension(d)),
        }
    }

    pub fn dimension(self) -> usize {
        match self {
            GridKind::UniformAngle => 2,
            GridKind::GaussLatlong => 3,
        }
    }
}

/// Sparse linear map from nodal values to tangential gradient vectors.
///
/// Row `i` lists `(j, c)` pairs with `∇_τ f(θ_i) ≈ Σ c f_j`.
#[derive(Clone, Debug)]
pub struct TangentStencil {
    rows: Vec<Vec<(usize, Vec3)>>,
}

impl TangentStencil {
    pub fn apply(&self, field: &[f64]) -> Vec<Vec3> {
        self.rows
            .iter()
            .map(|row| {
                let mut g = vec3::ZERO;
                for &(j, c) in row {
                    vec3::axpy(&mut g, field[j], c);
                }
                g
            })
            .collect()
    }

    /// `diag(Tᵀ W T)_j = Σ_i w_i |c_ij|²` for nodal weights `w`.
    pub fn gram_diagonal(&self, weights: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.rows.len()];
        for (row, &w) in self.rows.iter().zip(weights) {
            for &(j, c) in row {
                out[j] += w * vec3::norm2(c);
            }
        }
        out
    }

    /// Adjoint map: `out_j = Σ_i c_ij · v_i`.
    pub fn apply_transpose(&self, vectors: &[Vec3]) -> Vec<f64> {
        let mut out = vec![0.0; self.rows.len()];
        for (row, v) in self.rows.iter().zip(vectors) {
            for &(j, c) in row {
                out[j] += vec3::dot(c, *v);
            }
        }
        out
    }
}

/// Nodes, surface-measure weights and derivative stencils on `S^{d-1}`.
#[derive(Clone, Debug)]
pub struct SphereGrid {
    kind: GridKind,
    n: usize,
    nodes: Vec<Vec3>,
    weights: Vec<f64>,
    stencil: TangentStencil,
    polar_angles: Vec<f64>,
    filter: BandFilter,
}

/// Builds the grid for dimension `d` at resolution `n`.
///
/// `d = 2`: `n` uniform angles. `d = 3`: `n` polar Gauss nodes (poles
/// excluded) times `2n` uniform azimuths.
pub fn make_grid(d: usize, n: usize) -> Result<SphereGrid> {
    SphereGrid::new(GridKind::for_dimension(d)?, n)
}

impl SphereGrid {
    pub fn new(kind: GridKind, n: usize) -> Result<Self> {
        if n < MIN_RESOLUTION {
            return Err(Error::ResolutionTooSmall {
                n,
                min: MIN_RESOLUTION,
            });
        }
        Ok(match kind {
            GridKind::UniformAngle => Self::circle(n),
            GridKind::GaussLatlong => Self::latlong(n),
        })
    }

    fn circle(n: usize) -> Self {
        let dt = 2.0 * PI / n as f64;
        let nodes: Vec<Vec3> = (0..n)
            .map(|j| {
                let t = dt * j as f64;
                [t.cos(), t.sin(), 0.0]
            })
            .collect();
        let weights = vec![dt; n];
        let rows = (0..n)
            .map(|j| {
                let tau = [-nodes[j][1], nodes[j][0], 0.0];
                let at = |o: isize| (j as isize + o).rem_euclid(n as isize) as usize;
                let c = 1.0 / (12.0 * dt);
                vec![
                    (at(-2), vec3::scale(tau, c)),
                    (at(-1), vec3::scale(tau, -8.0 * c)),
                    (at(1), vec3::scale(tau, 8.0 * c)),
                    (at(2), vec3::scale(tau, -c)),
                ]
            })
            .collect();
        SphereGrid {
            kind: GridKind::UniformAngle,
            n,
            nodes,
            weights,
            stencil: TangentStencil { rows },
            polar_angles: Vec::new(),
            filter: BandFilter::circle(n),
        }
    }

    fn latlong(n: usize) -> Self {
        let (x, g) = gauss_legendre(n);
        // polar angle ascending: phi_i = acos(-x_i) pairs with the weight g_i (symmetric rule)
        let polar: Vec<f64> = x.iter().map(|&xi| (-xi).acos()).collect();
        let na = 2 * n;
        let dl = PI / n as f64;
        let mut nodes = Vec::with_capacity(n * na);
        let mut weights = Vec::with_capacity(n * na);
        for (i, &phi) in polar.iter().enumerate() {
            let (sp, cp) = phi.sin_cos();
            for k in 0..na {
                let (sl, cl) = (dl * k as f64).sin_cos();
                nodes.push([sp * cl, sp * sl, cp]);
                weights.push(g[i] * dl);
            }
        }

        let idx = |i: usize, k: usize| i * na + k;
        // meridian great circle through azimuth k, walked by increasing psi
        let meridian = |k: usize, q: isize| -> (usize, f64) {
            let len = 2 * n as isize;
            let qm = q.rem_euclid(len);
            let wraps = (q - qm) / len;
            let (node, psi) = if (qm as usize) < n {
                (idx(qm as usize, k), polar[qm as usize])
            } else {
                let i = (2 * n - 1) - qm as usize;
                (idx(i, (k + n) % na), 2.0 * PI - polar[i])
            };
            (node, psi + 2.0 * PI * wraps as f64)
        };

        let mut rows = Vec::with_capacity(n * na);
        for (i, &phi) in polar.iter().enumerate() {
            let (sp, cp) = phi.sin_cos();
            for k in 0..na {
                let (sl, cl) = (dl * k as f64).sin_cos();
                let e_phi = [cp * cl, cp * sl, -sp];
                let e_lam = [-sl, cl, 0.0];
                let mut row = Vec::with_capacity(9);

                let pts: Vec<(usize, f64)> =
                    (-2..=2).map(|o| meridian(k, i as isize + o)).collect();
                let offsets: Vec<f64> = pts.iter().map(|&(_, psi)| psi - phi).collect();
                for (m, &(node, _)) in pts.iter().enumerate() {
                    let w = lagrange_derivative_at_zero(&offsets, m);
                    if w != 0.0 {
                        row.push((node, vec3::scale(e_phi, w)));
                    }
                }

                let c = 1.0 / (12.0 * dl * sp);
                let at = |o: isize| idx(i, (k as isize + o).rem_euclid(na as isize) as usize);
                row.push((at(-2), vec3::scale(e_lam, c)));
                row.push((at(-1), vec3::scale(e_lam, -8.0 * c)));
                row.push((at(1), vec3::scale(e_lam, 8.0 * c)));
                row.push((at(2), vec3::scale(e_lam, -c)));
                rows.push(row);
            }
        }
        SphereGrid {
            kind: GridKind::GaussLatlong,
            n,
            nodes,
            weights,
            stencil: TangentStencil { rows },
            polar_angles: polar,
            filter: BandFilter::sphere(&x.iter().map(|v| -v).collect::<Vec<_>>(), &g, na),
        }
    }

    pub fn kind(&self) -> GridKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.kind.dimension()
    }

    /// Resolution parameter the grid was built with.
    pub fn resolution(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Vec3] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn stencil(&self) -> &TangentStencil {
        &self.stencil
    }

    /// Polar angles of the latitude rings (empty for `d = 2`).
    pub fn polar_angles(&self) -> &[f64] {
        &self.polar_angles
    }

    /// Number of azimuthal nodes per ring (`d = 3`), or `n` on the circle.
    pub fn azimuth_count(&self) -> usize {
        match self.kind {
            GridKind::UniformAngle => self.n,
            GridKind::GaussLatlong => 2 * self.n,
        }
    }

    /// Surface area `d ω_d` of the sphere.
    pub fn area(&self) -> f64 {
        sphere_area(self.dim())
    }

    /// Projection onto the resolved harmonics: Fourier modes `|k| ≤ n/4` on
    /// the circle, spherical harmonics of degree `≤ n/2` on the sphere.
    pub fn band_limit(&self, field: &[f64]) -> Vec<f64> {
        self.filter.apply(field)
    }

    /// Dirichlet energy `∫|∇_τ f|²` computed spectrally; exact for fields
    /// resolved by the grid (degree `< n` on the sphere, `< n/2` on the circle).
    pub fn spectral_dirichlet(&self, field: &[f64]) -> f64 {
        let na = self.azimuth_count();
        match self.kind {
            GridKind::UniformAngle => super::filter::dirichlet_energy(field, None, na),
            GridKind::GaussLatlong => {
                let dl = 2.0 * PI / na as f64;
                let x: Vec<f64> = self.polar_angles.iter().map(|t| t.cos()).collect();
                let g: Vec<f64> = (0..self.n).map(|i| self.weights[i * na] / dl).collect();
                super::filter::dirichlet_energy(field, Some((&x, &g)), na)
            }
        }
    }

    /// Weighted integral `Σ w_j f_j`.
    pub fn integrate(&self, field: &[f64]) -> f64 {
        crate::energy::sum::neumaier(self.weights.iter().zip(field).map(|(w, f)| w * f))
    }

    /// Weighted mean of a nodal field.
    pub fn mean(&self, field: &[f64]) -> f64 {
        self.integrate(field) / self.area()
    }

    /// Indices of the coarse sub-grid obtained by dropping every other
    /// azimuthal node, with the weight multiplier that keeps it a valid rule.
    /// `None` when the azimuthal count is odd.
    pub(crate) fn coarse_subset(&self) -> Option<(Vec<usize>, f64)> {
        let na = self.azimuth_count();
        if na % 2 != 0 {
            return None;
        }
        let idx = (0..self.len()).filter(|j| (j % na) % 2 == 0).collect();
        Some((idx, 2.0))
    }
}

/// Volume `ω_d` of the unit ball.
pub fn unit_ball_volume(d: usize) -> f64 {
    match d {
        2 => PI,
        3 => 4.0 * PI / 3.0,
        _ => panic!("unsupported dimension {d}"),
    }
}

/// Surface area `d ω_d` of `S^{d-1}`.
pub fn sphere_area(d: usize) -> f64 {
    d as f64 * unit_ball_volume(d)
}

/// Tangential gradient of a nodal field, as ambient vectors tangent to the
/// sphere. Fourth-order periodic differences on the circle; on the lat-long
/// grid, five-point differences along meridians (continued across the poles)
/// and fourth-order periodic differences in azimuth.
pub fn tangential_gradient(field: &[f64], grid: &SphereGrid) -> Result<Vec<Vec3>> {
    if field.len() != grid.len() {
        return Err(Error::LengthMismatch {
            expected: grid.len(),
            got: field.len(),
        });
    }
    Ok(grid.stencil.apply(field))
}

/// `‖f‖²_{H¹} = ∫ f² + |∇_τ f|² dσ` by grid quadrature.
pub fn h1_norm_sq(field: &[f64], grid: &SphereGrid) -> Result<f64> {
    let g = tangential_gradient(field, grid)?;
    Ok(grid.integrate(
        &field
            .iter()
            .zip(&g)
            .map(|(f, gv)| f * f + vec3::norm2(*gv))
            .collect::<Vec<_>>(),
    ))
}

fn lagrange_derivative_at_zero(offsets: &[f64], m: usize) -> f64 {
    let dm = offsets[m];
    let mut total = 0.0;
    for (l, &dl) in offsets.iter().enumerate() {
        if l == m {
            continue;
        }
        let mut term = 1.0 / (dm - dl);
        for (q, &dq) in offsets.iter().enumerate() {
            if q != m && q != l {
                term *= -dq / (dm - dq);
            }
        }
        total += term;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_area() {
        let g2 = make_grid(2, 64).unwrap();
        assert!((g2.weights().iter().sum::<f64>() - 2.0 * PI).abs() < 1e-10);
        let g3 = make_grid(3, 32).unwrap();
        assert!((g3.weights().iter().sum::<f64>() - 4.0 * PI).abs() < 1e-10);
        assert!(g3.weights().iter().all(|&w| w > 0.0));
    }

    #[test]
    fn nodes_are_unit_vectors() {
        for g in [make_grid(2, 64).unwrap(), make_grid(3, 12).unwrap()] {
            assert!(g.nodes().iter().all(|x| (vec3::norm(*x) - 1.0).abs() < 1e-12));
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(make_grid(4, 16), Err(Error::UnsupportedDimension(4))));
        assert!(matches!(
            make_grid(2, 7),
            Err(Error::ResolutionTooSmall { n: 7, .. })
        ));
    }

    #[test]
    fn lagrange_weights_match_uniform_stencil() {
        let h = 0.1;
        let offs = [-2.0 * h, -h, 0.0, h, 2.0 * h];
        let w: Vec<f64> = (0..5).map(|m| lagrange_derivative_at_zero(&offs, m)).collect();
        let expect = [1.0, -8.0, 0.0, 8.0, -1.0].map(|c| c / (12.0 * h));
        for (a, b) in w.iter().zip(expect) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn band_limit_projects() {
        for g in [make_grid(2, 32).unwrap(), make_grid(3, 12).unwrap()] {
            let smooth: Vec<f64> = g.nodes().iter().map(|x| 1.0 + x[0] - 2.0 * x[1] * x[2]).collect();
            let f = g.band_limit(&smooth);
            assert!(f.iter().zip(&smooth).all(|(a, b)| (a - b).abs() < 1e-12));
            let na = g.azimuth_count();
            let zigzag: Vec<f64> = (0..g.len()).map(|j| if (j % na) % 2 == 0 { 1.0 } else { -1.0 }).collect();
            assert!(g.band_limit(&zigzag).iter().all(|v| v.abs() < 1e-12));
            let rough: Vec<f64> = (0..g.len()).map(|j| ((j * 7919) % 13) as f64).collect();
            let once = g.band_limit(&rough);
            let twice = g.band_limit(&once);
            assert!(once.iter().zip(&twice).all(|(a, b)| (a - b).abs() < 1e-10));
        }
    }

    #[test]
    fn gradient_of_linear_function_on_sphere() {
        // ∇_τ (a·θ) = a - (a·θ) θ
        let g = make_grid(3, 24).unwrap();
        let a = [0.3, -0.7, 0.5];
        let f: Vec<f64> = g.nodes().iter().map(|x| vec3::dot(a, *x)).collect();
        let grad = tangential_gradient(&f, &g).unwrap();
        let mut worst: f64 = 0.0;
        for (x, gv) in g.nodes().iter().zip(&grad) {
            let exact = vec3::sub(a, vec3::scale(*x, vec3::dot(a, *x)));
            worst = worst.max(vec3::norm(vec3::sub(exact, *gv)));
        }
        assert!(worst < 2e-3, "worst error {worst}");
    }
}
