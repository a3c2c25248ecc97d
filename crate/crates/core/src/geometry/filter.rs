//! Orthogonal projection of nodal fields onto low-degree harmonics.
//!
//! Circle: Fourier modes `|k| ≤ n/4`. Sphere: spherical harmonics of degree
//! `≤ n/2`, exact on the Gauss lat-long grid. Both keep `kΔ ≤ π/2`, where the
//! fourth-order difference stencils still resolve the mode. The projection
//! is self-adjoint in the grid's weighted inner product.

use std::f64::consts::PI;

#[derive(Clone, Debug)]
pub(crate) enum BandFilter {
    Circle {
        n: usize,
        kmax: usize,
    },
    Sphere {
        rings: usize,
        azimuths: usize,
        lmax: usize,
        weights: Vec<f64>,
        /// `legendre[m][l - m][i] = P̄_l^m(x_i)`.
        legendre: Vec<Vec<Vec<f64>>>,
    },
}

impl BandFilter {
    pub(crate) fn circle(n: usize) -> Self {
        BandFilter::Circle { n, kmax: n / 4 }
    }

    /// `x`, `g`: Gauss nodes and weights in `cos` of the polar angle, in ring order.
    pub(crate) fn sphere(x: &[f64], g: &[f64], azimuths: usize) -> Self {
        let rings = x.len();
        let lmax = rings / 2;
        let mut legendre = Vec::with_capacity(lmax + 1);
        for m in 0..=lmax {
            let mut table = vec![vec![0.0; rings]; lmax - m + 1];
            for (i, &xi) in x.iter().enumerate() {
                let vals = normalized_legendre_column(m, lmax, xi);
                for (l, v) in vals.into_iter().enumerate() {
                    table[l][i] = v;
                }
            }
            legendre.push(table);
        }
        BandFilter::Sphere {
            rings,
            azimuths,
            lmax,
            weights: g.to_vec(),
            legendre,
        }
    }

    pub(crate) fn apply(&self, field: &[f64]) -> Vec<f64> {
        match self {
            BandFilter::Circle { n, kmax } => {
                let n = *n;
                let coef = fourier(field, *kmax);
                (0..n).map(|j| synth(&coef, 2.0 * PI * j as f64 / n as f64)).collect()
            }
            BandFilter::Sphere {
                rings,
                azimuths,
                lmax,
                weights,
                legendre,
            } => {
                let na = *azimuths;
                let ring_coef: Vec<Vec<(f64, f64)>> = (0..*rings)
                    .map(|i| fourier(&field[i * na..(i + 1) * na], *lmax))
                    .collect();
                let mut filtered = vec![vec![(0.0, 0.0); lmax + 1]; *rings];
                for (m, table) in legendre.iter().enumerate() {
                    for row in table {
                        let (mut a, mut b) = (0.0, 0.0);
                        for (i, p) in row.iter().enumerate() {
                            a += weights[i] * p * ring_coef[i][m].0;
                            b += weights[i] * p * ring_coef[i][m].1;
                        }
                        for (i, p) in row.iter().enumerate() {
                            filtered[i][m].0 += a * p;
                            filtered[i][m].1 += b * p;
                        }
                    }
                }
                let mut out = Vec::with_capacity(field.len());
                for coef in &filtered {
                    for k in 0..na {
                        out.push(synth(coef, 2.0 * PI * k as f64 / na as f64));
                    }
                }
                out
            }
        }
    }
}

/// `∫|∇_τ f|² dσ` from the full discrete spectrum: Fourier modes up to the
/// Nyquist index on the circle, spherical harmonics of degree `< rings` on the
/// sphere (`x`, `g`: ring cosines and Gauss weights). Exact for fields of
/// degree `< rings` (sphere) or `< n/2` (circle).
pub(crate) fn dirichlet_energy(field: &[f64], rings: Option<(&[f64], &[f64])>, azimuths: usize) -> f64 {
    match rings {
        None => fourier(field, azimuths / 2)
            .iter()
            .enumerate()
            .map(|(k, (a, b))| (k * k) as f64 * PI * (a * a + b * b))
            .sum(),
        Some((x, g)) => {
            let nr = x.len();
            let mmax = (azimuths / 2).min(nr - 1);
            let ring_coef: Vec<Vec<(f64, f64)>> = (0..nr)
                .map(|i| fourier(&field[i * azimuths..(i + 1) * azimuths], mmax))
                .collect();
            let cols: Vec<Vec<Vec<f64>>> = (0..=mmax)
                .map(|m| x.iter().map(|&xi| normalized_legendre_column(m, nr - 1, xi)).collect())
                .collect();
            let mut total = 0.0;
            for (m, col) in cols.iter().enumerate() {
                let norm = if m == 0 { 2.0 * PI } else { PI };
                for l in m..nr {
                    let (mut a, mut b) = (0.0, 0.0);
                    for i in 0..nr {
                        a += g[i] * col[i][l - m] * ring_coef[i][m].0;
                        b += g[i] * col[i][l - m] * ring_coef[i][m].1;
                    }
                    total += (l * (l + 1)) as f64 * norm * (a * a + b * b);
                }
            }
            total
        }
    }
}

/// `(a_k, b_k)` with `f(t) = Σ a_k cos kt + b_k sin kt`, `k ≤ kmax < len/2`
/// (the `k = len/2` cosine is halved accordingly).
fn fourier(f: &[f64], kmax: usize) -> Vec<(f64, f64)> {
    let n = f.len();
    (0..=kmax)
        .map(|k| {
            let (mut a, mut b) = (0.0, 0.0);
            for (j, &v) in f.iter().enumerate() {
                let (s, c) = (2.0 * PI * (k * j % n) as f64 / n as f64).sin_cos();
                a += v * c;
                b += v * s;
            }
            let scale = if k == 0 || 2 * k == n { 1.0 } else { 2.0 } / n as f64;
            (a * scale, b * scale)
        })
        .collect()
}

fn synth(coef: &[(f64, f64)], t: f64) -> f64 {
    coef.iter()
        .enumerate()
        .map(|(k, (a, b))| {
            let (s, c) = (k as f64 * t).sin_cos();
            a * c + b * s
        })
        .sum()
}

/// `P̄_l^m(x)` for `l = m..=lmax`, normalized by `∫_{-1}^{1} P̄² dx = 1`.
fn normalized_legendre_column(m: usize, lmax: usize, x: f64) -> Vec<f64> {
    let s = (1.0 - x * x).max(0.0).sqrt();
    let mut pmm = (0.5f64).sqrt();
    for k in 1..=m {
        let k = k as f64;
        pmm *= ((2.0 * k + 1.0) / (2.0 * k)).sqrt() * s;
    }
    let mut out = Vec::with_capacity(lmax - m + 1);
    out.push(pmm);
    if m < lmax {
        out.push((2.0 * m as f64 + 3.0).sqrt() * x * pmm);
    }
    for l in (m + 2)..=lmax {
        let (lf, mf) = (l as f64, m as f64);
        let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
        let b = (((lf - 1.0).powi(2) - mf * mf) / (4.0 * (lf - 1.0).powi(2) - 1.0)).sqrt();
        let next = a * (x * out[l - m - 1] - b * out[l - m - 2]);
        out.push(next);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::gauss_legendre;

    #[test]
    fn legendre_orthonormal_under_gauss() {
        let (x, g) = gauss_legendre(12);
        for m in 0..=6 {
            let cols: Vec<Vec<f64>> = x.iter().map(|&xi| normalized_legendre_column(m, 6, xi)).collect();
            for l1 in 0..=(6 - m) {
                for l2 in 0..=(6 - m) {
                    let ip: f64 = (0..12).map(|i| g[i] * cols[i][l1] * cols[i][l2]).sum();
                    let expect = if l1 == l2 { 1.0 } else { 0.0 };
                    assert!((ip - expect).abs() < 1e-12, "m {m} l {l1},{l2}: {ip}");
                }
            }
        }
    }
}
