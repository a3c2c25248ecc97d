//! Planar rasters on the global lattice `h·(ℤ + ½)²` and their measures.
//!
//! Perimeters use a four-direction Crofton count: each pair of neighbouring
//! cells (axial or diagonal) with different occupancy is one line crossing,
//! weighted by `π/8` times the line spacing (`h` axial, `h/√2` diagonal),
//! then scaled by a single factor calibrated on discs.

use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::energy::density;
use crate::geometry::{Configuration, StarShape};
use crate::{Error, Result};

/// Fewest occupied cells a raster may have.
pub const MIN_OCCUPIED: usize = 100;

/// Occupancy bitmap over the cells `i0..i0+nx` × `j0..j0+ny`, whose centers
/// are `((i + ½)h, (j + ½)h)`. Cells outside the window are empty.
#[derive(Clone, Debug)]
pub struct RasterSet {
    h: f64,
    i0: i64,
    j0: i64,
    nx: usize,
    ny: usize,
    cells: Vec<bool>,
    occupied: Vec<u32>,
}

/// Axis-aligned bounds `[x0, x1] × [y0, y1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Bounds {
    pub fn square(center: [f64; 2], half: f64) -> Self {
        Bounds {
            x0: center[0] - half,
            y0: center[1] - half,
            x1: center[0] + half,
            y1: center[1] + half,
        }
    }
}

impl RasterSet {
    /// Occupies every lattice cell in `bounds` whose center satisfies `inside`.
    pub fn from_predicate<F: Fn(f64, f64) -> bool>(h: f64, bounds: Bounds, inside: F) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "h",
                value: h,
                constraint: "must be positive and finite",
            });
        }
        let i0 = (bounds.x0 / h).floor() as i64;
        let j0 = (bounds.y0 / h).floor() as i64;
        let nx = ((bounds.x1 / h).ceil() as i64 - i0).max(1) as usize;
        let ny = ((bounds.y1 / h).ceil() as i64 - j0).max(1) as usize;
        let mut cells = vec![false; nx * ny];
        for (row, chunk) in cells.chunks_mut(nx).enumerate() {
            let y = (j0 + row as i64) as f64 * h + 0.5 * h;
            for (col, c) in chunk.iter_mut().enumerate() {
                let x = (i0 + col as i64) as f64 * h + 0.5 * h;
                *c = inside(x, y);
            }
        }
        let occupied: Vec<u32> = cells
            .iter()
            .enumerate()
            .filter(|(_, &c)| c)
            .map(|(k, _)| k as u32)
            .collect();
        if occupied.len() < MIN_OCCUPIED {
            return Err(Error::ResolutionTooCoarse {
                occupied: occupied.len(),
                required: MIN_OCCUPIED,
            });
        }
        Ok(RasterSet {
            h,
            i0,
            j0,
            nx,
            ny,
            cells,
            occupied,
        })
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Bounds of the cell window.
    pub fn bounds(&self) -> Bounds {
        Bounds {
            x0: self.i0 as f64 * self.h,
            y0: self.j0 as f64 * self.h,
            x1: (self.i0 + self.nx as i64) as f64 * self.h,
            y1: (self.j0 + self.ny as i64) as f64 * self.h,
        }
    }

    pub fn occupied_count(&self) -> usize {
        self.occupied.len()
    }

    /// `occupied cells × h²`.
    pub fn volume(&self) -> f64 {
        self.occupied.len() as f64 * self.h * self.h
    }

    /// Occupancy of the global cell `(i, j)`.
    pub fn cell(&self, i: i64, j: i64) -> bool {
        let (a, b) = (i - self.i0, j - self.j0);
        if a < 0 || b < 0 || a >= self.nx as i64 || b >= self.ny as i64 {
            return false;
        }
        self.cells[b as usize * self.nx + a as usize]
    }

    pub fn cell_center(&self, i: i64, j: i64) -> [f64; 2] {
        [(i as f64 + 0.5) * self.h, (j as f64 + 0.5) * self.h]
    }

    /// Global index of the `k`-th occupied cell.
    pub(crate) fn occupied_cell(&self, k: usize) -> (i64, i64) {
        let lin = self.occupied[k] as usize;
        (self.i0 + (lin % self.nx) as i64, self.j0 + (lin / self.nx) as i64)
    }

    /// Membership of the cell containing `x`.
    pub fn contains_point(&self, x: [f64; 2]) -> bool {
        self.cell((x[0] / self.h).floor() as i64, (x[1] / self.h).floor() as i64)
    }

    /// Global cell range covering both windows.
    fn joint_window(&self, other: &RasterSet) -> (i64, i64, i64, i64) {
        (
            self.i0.min(other.i0),
            self.j0.min(other.j0),
            (self.i0 + self.nx as i64).max(other.i0 + other.nx as i64),
            (self.j0 + self.ny as i64).max(other.j0 + other.ny as i64),
        )
    }

    /// `|E △ F|` on the shared lattice.
    pub fn symmetric_difference(&self, other: &RasterSet) -> Result<f64> {
        if self.h != other.h {
            return Err(Error::GridMismatch);
        }
        let (ia, ja, ib, jb) = self.joint_window(other);
        let mut count = 0usize;
        for j in ja..jb {
            for i in ia..ib {
                if self.cell(i, j) != other.cell(i, j) {
                    count += 1;
                }
            }
        }
        Ok(count as f64 * self.h * self.h)
    }

    /// Crofton crossings as `(midpoint, length weight)`; the weights are
    /// uncalibrated.
    pub(crate) fn crossings(&self) -> Vec<([f64; 2], f64)> {
        let h = self.h;
        let axial = PI / 8.0 * h;
        let diagonal = axial / 2f64.sqrt();
        let dirs: [(i64, i64, f64); 4] = [(1, 0, axial), (0, 1, axial), (1, 1, diagonal), (1, -1, diagonal)];
        let mut out = Vec::new();
        for j in (self.j0 - 1)..=(self.j0 + self.ny as i64) {
            for i in (self.i0 - 1)..=(self.i0 + self.nx as i64) {
                let here = self.cell(i, j);
                for &(di, dj, w) in &dirs {
                    if here != self.cell(i + di, j + dj) {
                        let c = [(i as f64 + 0.5 + 0.5 * di as f64) * h, (j as f64 + 0.5 + 0.5 * dj as f64) * h];
                        out.push((c, w));
                    }
                }
            }
        }
        out
    }
}

/// Rasterizes a planar configuration (union of its components).
pub fn rasterize(config: &Configuration, h: f64) -> Result<RasterSet> {
    match config.dim() {
        Some(2) => {}
        Some(d) => return Err(Error::UnsupportedDimension(d)),
        None => return Err(Error::Degenerate("empty configuration".into())),
    }
    let mut b = Bounds {
        x0: f64::INFINITY,
        y0: f64::INFINITY,
        x1: f64::NEG_INFINITY,
        y1: f64::NEG_INFINITY,
    };
    for c in config.components() {
        let r = 1.1 * c.max_radius();
        let x = c.center();
        b.x0 = b.x0.min(x[0] - r);
        b.y0 = b.y0.min(x[1] - r);
        b.x1 = b.x1.max(x[0] + r);
        b.y1 = b.y1.max(x[1] + r);
    }
    RasterSet::from_predicate(h, b, |x, y| config.contains([x, y, 0.0]))
}

pub fn rasterize_shape(shape: &StarShape, h: f64) -> Result<RasterSet> {
    rasterize(&Configuration::single(shape.clone()), h)
}

/// Volume and (weighted) perimeter of a raster.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RasterMeasures {
    pub volume: f64,
    pub perimeter: f64,
    /// `∫_{∂E} |x|^p`.
    pub weighted_perimeter: f64,
}

pub fn raster_measures(rs: &RasterSet, p: f64) -> RasterMeasures {
    let k = perimeter_calibration();
    let mut per = 0.0;
    let mut wper = 0.0;
    for (c, w) in rs.crossings() {
        per += w;
        wper += w * density([c[0], c[1], 0.0], p);
    }
    RasterMeasures {
        volume: rs.volume(),
        perimeter: k * per,
        weighted_perimeter: k * wper,
    }
}

/// Raster perimeter of `E` restricted to crossings with midpoint in `A`.
pub(crate) fn perimeter_in<F: Fn([f64; 2]) -> bool>(rs: &RasterSet, region: F) -> f64 {
    perimeter_calibration() * rs.crossings().iter().filter(|(c, _)| region(*c)).map(|(_, w)| w).sum::<f64>()
}

/// Discs used to calibrate the perimeter estimator: `(radius, center)`.
const CALIBRATION_DISCS: [(f64, [f64; 2]); 4] = [
    (1.0, [0.0, 0.0]),
    (1.0, [0.3137, 0.2718]),
    (0.5, [-0.1234, 0.4321]),
    (2.0, [0.0577, -0.1414]),
];

const CALIBRATION_H: f64 = 1.0 / 256.0;

/// Mean of `true / Crofton` perimeter over [`CALIBRATION_DISCS`] at
/// `h = 1/256`, computed once.
pub fn perimeter_calibration() -> f64 {
    static FACTOR: OnceLock<f64> = OnceLock::new();
    *FACTOR.get_or_init(|| {
        let ratios: Vec<f64> = CALIBRATION_DISCS
            .iter()
            .map(|&(r, c)| {
                let rs = RasterSet::from_predicate(CALIBRATION_H, Bounds::square(c, 1.1 * r), |x, y| {
                    (x - c[0]).powi(2) + (y - c[1]).powi(2) <= r * r
                })
                .expect("calibration discs are resolved");
                let raw: f64 = rs.crossings().iter().map(|(_, w)| w).sum();
                2.0 * PI * r / raw
            })
            .collect();
        ratios.iter().sum::<f64>() / ratios.len() as f64
    })
}

/// Number of lattice cells with centers in `{x : r0 ≤ |x| < r1}`.
pub(crate) fn lattice_annulus_count(h: f64, r0: f64, r1: f64) -> usize {
    let m = (r1 / h).ceil() as i64 + 1;
    let mut count = 0;
    for j in -m..m {
        let y = (j as f64 + 0.5) * h;
        for i in -m..m {
            let x = (i as f64 + 0.5) * h;
            let q = x * x + y * y;
            if q >= r0 * r0 && q < r1 * r1 {
                count += 1;
            }
        }
    }
    count
}

/// `(x, weight)` for each lattice cell center inside the closed ball.
pub(crate) fn lattice_ball(h: f64, x: [f64; 2], r: f64) -> Vec<([f64; 2], (i64, i64))> {
    let (ia, ib) = (((x[0] - r) / h).floor() as i64 - 1, ((x[0] + r) / h).ceil() as i64 + 1);
    let (ja, jb) = (((x[1] - r) / h).floor() as i64 - 1, ((x[1] + r) / h).ceil() as i64 + 1);
    let mut out = Vec::new();
    for j in ja..=jb {
        for i in ia..=ib {
            let c = [(i as f64 + 0.5) * h, (j as f64 + 0.5) * h];
            if (c[0] - x[0]).powi(2) + (c[1] - x[1]).powi(2) <= r * r {
                out.push((c, (i, j)));
            }
        }
    }
    out
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_volume_is_exact() {
        let rs = RasterSet::from_predicate(1.0 / 64.0, Bounds::square([0.5, 0.5], 0.75), |x, y| {
            (0.0..1.0).contains(&x) && (0.0..1.0).contains(&y)
        })
        .unwrap();
        assert_eq!(rs.volume(), 1.0);
    }

    #[test]
    fn calibration_is_near_one() {
        let k = perimeter_calibration();
        assert!((k - 1.0).abs() < 0.02, "{k}");
    }

    #[test]
    fn too_few_cells_is_an_error() {
        let r = RasterSet::from_predicate(0.1, Bounds::square([0.0, 0.0], 1.0), |x, y| x * x + y * y < 0.1);
        assert!(matches!(r, Err(Error::ResolutionTooCoarse { .. })));
    }
}
