//! Checkers for the relative isoperimetric inequality on dyadic annuli, the
//! Lipschitz bound of the Riesz energy under symmetric difference, the
//! weighted relative density, the small-mass perimeter expansion, and
//! quasi-minimality of computed minimizers.

use serde::{Deserialize, Serialize};

use super::mc::mc_riesz_difference;
use super::raster::{lattice_annulus_count, lattice_ball, perimeter_in, rasterize, RasterSet};
use crate::energy::{density, weighted_perimeter};
use crate::geometry::{sphere_area, unit_ball_volume, unit_volume_radius, Configuration, EnergyParams};
use crate::{Error, Result};

/// Both sides of the relative isoperimetric inequality on
/// `A_j = {2^j ≤ |x| < 2^{j+1}}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelIsop {
    /// `min(|E ∩ A|, |A \ E|)^{(d-1)/d}`.
    pub lhs: f64,
    /// `P(E; A)`.
    pub per: f64,
    /// `lhs / per`; zero when `lhs` vanishes.
    pub ratio: f64,
}

pub fn check_rel_isop(rs: &RasterSet, j: i32) -> Result<RelIsop> {
    if !reaches_annulus(rs, j) {
        return Err(Error::Degenerate(format!("raster does not reach the annulus j = {j}")));
    }
    let h = rs.h();
    let (r0, r1) = (2f64.powi(j), 2f64.powi(j + 1));
    let in_annulus = |c: [f64; 2]| {
        let q = c[0] * c[0] + c[1] * c[1];
        q >= r0 * r0 && q < r1 * r1
    };
    let total = lattice_annulus_count(h, r0, r1);
    let mut inside = 0usize;
    for k in 0..rs.occupied_count() {
        let (i, jj) = rs.occupied_cell(k);
        if in_annulus(rs.cell_center(i, jj)) {
            inside += 1;
        }
    }
    let part = inside.min(total - inside) as f64 * h * h;
    let lhs = part.sqrt();
    let per = perimeter_in(rs, in_annulus);
    if per == 0.0 && lhs > 0.0 {
        return Err(Error::Degenerate(format!(
            "zero perimeter in annulus j = {j} with a proper intersection"
        )));
    }
    Ok(RelIsop {
        lhs,
        per,
        ratio: if lhs == 0.0 { 0.0 } else { lhs / per },
    })
}

/// Whether the raster window meets `A_j`.
pub(crate) fn reaches_annulus(rs: &RasterSet, j: i32) -> bool {
    let (r0, r1) = (2f64.powi(j), 2f64.powi(j + 1));
    let b = rs.bounds();
    let near = (b.x0.max(0.0).max(-b.x1)).hypot(b.y0.max(0.0).max(-b.y1));
    let far = b.x0.abs().max(b.x1.abs()).hypot(b.y0.abs().max(b.y1.abs()));
    near < r1 && far >= r0
}

/// `2∫_{B_1}|y|^{-α} dy + 2 = 2(dω_d/(d − α) + 1)`.
pub fn lipschitz_constant(d: usize, alpha: f64) -> f64 {
    2.0 * (sphere_area(d) / (d as f64 - alpha) + 1.0)
}

/// `|V(F) − V(E)|` by paired Monte Carlo against `C|E △ F|`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LipschitzCheck {
    pub lhs: f64,
    pub std_error: f64,
    pub symmetric_difference: f64,
    pub bound: f64,
}

impl LipschitzCheck {
    /// `bound − (lhs − 3σ)`; nonnegative when the inequality holds.
    pub fn margin(&self) -> f64 {
        self.bound - (self.lhs - 3.0 * self.std_error)
    }
}

pub fn check_v_lipschitz(e: &RasterSet, f: &RasterSet, alpha: f64, n_samples: usize, seed: u64) -> Result<LipschitzCheck> {
    for mass in [e.volume(), f.volume()] {
        if mass > 1.0 {
            return Err(Error::MassPreconditionViolated { mass });
        }
    }
    let diff = mc_riesz_difference(e, f, alpha, n_samples, seed)?;
    let sd = e.symmetric_difference(f)?;
    Ok(LipschitzCheck {
        lhs: diff.estimate.abs(),
        std_error: diff.std_error,
        symmetric_difference: sd,
        bound: lipschitz_constant(2, alpha) * sd,
    })
}

/// `min{L_a(E ∩ B_r(x)), L_a(B_r(x) \ E)} / L_a(B_r(x))` with `L_a(S) = ∫_S |y|^p`,
/// summed over the lattice cells centered in `B_r(x)`.
pub fn weighted_density(rs: &RasterSet, x: [f64; 2], r: f64, p: f64) -> Result<f64> {
    let b = rs.bounds();
    if x[0] - r < b.x0 || x[0] + r > b.x1 || x[1] - r < b.y0 || x[1] + r > b.y1 {
        return Err(Error::OutOfBounds { x: x[0], y: x[1], radius: r });
    }
    let (mut inside, mut total) = (0.0, 0.0);
    for (c, (i, j)) in lattice_ball(rs.h(), x, r) {
        let a = density([c[0], c[1], 0.0], p);
        total += a;
        if rs.cell(i, j) {
            inside += a;
        }
    }
    if !(total > 0.0) {
        return Err(Error::Degenerate("L_a(B_r(x)) vanishes".into()));
    }
    Ok(inside.min(total - inside) / total)
}

/// Perimeter gain of moving mass `m` from a unit-volume ball `B_{r_0}` into a
/// separate ball, `P_a(B_R) + P_a(B_ρ) − P_a(B_{r_0})` with
/// `R = (r_0^d + ρ^d)^{1/d}`, `ρ = (m/ω_d)^{1/d}`, against its leading term
/// `dω_d r_0^{p-1}(1 + (p − 1)/d) ρ^d = C̄ m`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnLowerBound {
    pub exact_lhs: f64,
    pub expansion: f64,
    pub ratio: f64,
    /// Order in `m` of the `P_a(B_ρ)` term, `(d − 1 + p)/d`; at most one
    /// when `p ≤ 1`, where it competes with the linear term.
    pub remainder_order: f64,
}

pub fn check_en_lower_bound(m: f64, p: f64, d: usize) -> Result<EnLowerBound> {
    if !(m >= 0.0 && m <= 0.1) {
        return Err(Error::InvalidParameter {
            name: "m",
            value: m,
            constraint: "must lie in [0, 0.1]",
        });
    }
    if !(p > 0.0) {
        return Err(Error::InvalidParameter {
            name: "p",
            value: p,
            constraint: "must be positive",
        });
    }
    if !(d == 2 || d == 3) {
        return Err(Error::UnsupportedDimension(d));
    }
    let df = d as f64;
    let q = df - 1.0 + p;
    let r0 = unit_volume_radius(d);
    let rho_d = m / unit_ball_volume(d);
    let big_r = (r0.powi(d as i32) + rho_d).powf(1.0 / df);
    let per = |r: f64| sphere_area(d) * r.powf(q);
    let exact_lhs = per(big_r) + per(rho_d.powf(1.0 / df)) - per(r0);
    let expansion = c_bar(p, d) * m;
    Ok(EnLowerBound {
        exact_lhs,
        expansion,
        ratio: if m == 0.0 { 1.0 } else { exact_lhs / expansion },
        remainder_order: q / df,
    })
}

/// `C̄ = dω_d r_0^{p-1}(1 + (p − 1)/d) / ω_d`, the coefficient of `m`.
pub fn c_bar(p: f64, d: usize) -> f64 {
    let df = d as f64;
    sphere_area(d) * unit_volume_radius(d).powf(p - 1.0) * (1.0 + (p - 1.0) / df) / unit_ball_volume(d)
}

/// Three-point extrapolation of `exact_lhs / (C̄ m)` over `m, m/2, m/4`,
/// assuming the leading correction `∝ m^s` with `s = min((p − 1)/d, 1)`.
/// Returns `(limit, residual)`, the residual relative to the limit.
pub fn en_lower_bound_limit(m: f64, p: f64, d: usize) -> Result<(f64, f64)> {
    if !(p > 1.0) {
        return Err(Error::InvalidParameter {
            name: "p",
            value: p,
            constraint: "extrapolation needs p > 1",
        });
    }
    let s = ((p - 1.0) / d as f64).min(1.0);
    let r: Vec<f64> = [m, m / 2.0, m / 4.0]
        .iter()
        .map(|&mi| check_en_lower_bound(mi, p, d).map(|c| c.ratio))
        .collect::<Result<_>>()?;
    let f = 2f64.powf(s);
    let l1 = (f * r[1] - r[0]) / (f - 1.0);
    let l2 = (f * r[2] - r[1]) / (f - 1.0);
    Ok((l2, (l2 - l1).abs() / l2.abs()))
}

/// Both sides of `P_a(Ω) ≤ P_a(F) + Cγ|F △ Ω|` for a planar competitor.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuasiMinimality {
    pub perimeter: f64,
    pub competitor_perimeter: f64,
    pub symmetric_difference: f64,
    pub rhs: f64,
    /// `rhs − perimeter`.
    pub margin: f64,
}

/// Perimeters by quadrature, `|F △ Ω|` on a raster of spacing `h`.
pub fn quasi_minimality(
    minimizer: &Configuration,
    competitor: &Configuration,
    params: &EnergyParams,
    h: f64,
) -> Result<QuasiMinimality> {
    let per = |c: &Configuration| -> f64 { c.components().iter().map(|s| weighted_perimeter(s, params.p)).sum() };
    let sd = rasterize(minimizer, h)?.symmetric_difference(&rasterize(competitor, h)?)?;
    let p0 = per(minimizer);
    let pf = per(competitor);
    let rhs = pf + lipschitz_constant(params.d, params.alpha) * params.gamma * sd;
    Ok(QuasiMinimality {
        perimeter: p0,
        competitor_perimeter: pf,
        symmetric_difference: sd,
        rhs,
        margin: rhs - p0,
    })
}
