use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::grid::{unit_ball_volume, SphereGrid};
use super::vec3::{self, Vec3};
use crate::{Error, Result};

/// Default lower bound on radial samples.
pub const R_MIN: f64 = 1e-6;

/// A star-shaped set `{c + ρθ : 0 ≤ ρ ≤ r(θ)}` sampled on a sphere grid.
#[derive(Clone, Debug)]
pub struct StarShape {
    grid: Arc<SphereGrid>,
    center: Vec3,
    radii: Vec<f64>,
    floor: f64,
}

impl StarShape {
    pub fn new(grid: Arc<SphereGrid>, center: &[f64], radii: Vec<f64>) -> Result<Self> {
        Self::with_floor(grid, center, radii, R_MIN)
    }

    pub fn with_floor(
        grid: Arc<SphereGrid>,
        center: &[f64],
        radii: Vec<f64>,
        floor: f64,
    ) -> Result<Self> {
        if center.len() != grid.dim() {
            return Err(Error::LengthMismatch {
                expected: grid.dim(),
                got: center.len(),
            });
        }
        if radii.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: radii.len(),
            });
        }
        for (index, &r) in radii.iter().enumerate() {
            if !r.is_finite() {
                return Err(Error::NonFiniteRadius { index });
            }
            if r < floor {
                return Err(Error::RadiusBelowFloor { radius: r, floor });
            }
        }
        if center.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "center",
                value: f64::NAN,
                constraint: "coordinates must be finite",
            });
        }
        Ok(StarShape {
            grid,
            center: vec3::from_slice(center),
            radii,
            floor,
        })
    }

    /// Replaces radii and center, clamping radii to the floor. Used by the
    /// optimizer where a trial step may undershoot.
    pub(crate) fn with_clamped(&self, center: Vec3, radii: Vec<f64>) -> Self {
        let floor = self.floor;
        StarShape {
            grid: Arc::clone(&self.grid),
            center,
            radii: radii.into_iter().map(|r| r.max(floor)).collect(),
            floor,
        }
    }

    pub fn grid(&self) -> &Arc<SphereGrid> {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    /// Center coordinates (length `d`).
    pub fn center(&self) -> &[f64] {
        &self.center[..self.dim()]
    }

    pub(crate) fn center3(&self) -> Vec3 {
        self.center
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn floor(&self) -> f64 {
        self.floor
    }

    pub fn max_radius(&self) -> f64 {
        self.radii.iter().copied().fold(0.0, f64::max)
    }

    /// Boundary point at node `j`.
    pub fn boundary_point(&self, j: usize) -> Vec3 {
        vec3::add(self.center, vec3::scale(self.grid.nodes()[j], self.radii[j]))
    }

    /// `|Ω| = (1/d) ∫ r^d dσ` by grid quadrature.
    pub fn volume(&self) -> f64 {
        let d = self.dim() as i32;
        let v: Vec<f64> = self.radii.iter().map(|r| r.powi(d)).collect();
        self.grid.integrate(&v) / d as f64
    }

    /// Dilation `Ω ↦ tΩ` about the origin (center and radii both scale).
    pub fn dilate(&self, t: f64) -> Result<Self> {
        if !(t > 0.0) {
            return Err(Error::ScaleNonPositive(t));
        }
        let radii: Vec<f64> = self.radii.iter().map(|r| r * t).collect();
        if let Some(&r) = radii.iter().find(|&&r| r < self.floor) {
            return Err(Error::RadiusBelowFloor {
                radius: r,
                floor: self.floor,
            });
        }
        Ok(StarShape {
            grid: Arc::clone(&self.grid),
            center: vec3::scale(self.center, t),
            radii,
            floor: self.floor,
        })
    }

    pub fn translate(&self, offset: &[f64]) -> Self {
        let mut s = self.clone();
        s.center = vec3::add(s.center, vec3::from_slice(offset));
        s
    }
}

/// Ball of radius `radius` centered at `center`.
pub fn make_ball(radius: f64, center: &[f64], grid: Arc<SphereGrid>) -> Result<StarShape> {
    if radius < R_MIN {
        return Err(Error::RadiusBelowFloor {
            radius,
            floor: R_MIN,
        });
    }
    let n = grid.len();
    StarShape::new(grid, center, vec![radius; n])
}

/// Radius of the ball of volume one, `r_0 = ω_d^{-1/d}`.
pub fn unit_volume_radius(d: usize) -> f64 {
    ball_radius_for_volume(d, 1.0)
}

pub fn ball_radius_for_volume(d: usize, volume: f64) -> f64 {
    (volume / unit_ball_volume(d)).powf(1.0 / d as f64)
}

pub fn volume(shape: &StarShape) -> f64 {
    shape.volume()
}

pub fn dilate(shape: &StarShape, t: f64) -> Result<StarShape> {
    shape.dilate(t)
}

/// An ordered union of pairwise disjoint star-shaped components.
#[derive(Clone, Debug, Default)]
pub struct Configuration {
    components: Vec<StarShape>,
}

impl Configuration {
    /// Builds and validates a configuration.
    pub fn new(components: Vec<StarShape>) -> Result<Self> {
        let c = Configuration { components };
        c.validate()?;
        Ok(c)
    }

    pub(crate) fn new_unchecked(components: Vec<StarShape>) -> Self {
        Configuration { components }
    }

    pub fn single(shape: StarShape) -> Self {
        Configuration {
            components: vec![shape],
        }
    }

    pub fn components(&self) -> &[StarShape] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn dim(&self) -> Option<usize> {
        self.components.first().map(|c| c.dim())
    }

    /// Checks the bounding-sphere disjointness certificate for every pair.
    pub fn validate(&self) -> Result<()> {
        if let Some(d) = self.dim() {
            if self.components.iter().any(|c| c.dim() != d) {
                return Err(Error::ShapeFile("components of mixed dimension".into()));
            }
        }
        for i in 0..self.components.len() {
            for j in (i + 1)..self.components.len() {
                let a = &self.components[i];
                let b = &self.components[j];
                let dist = vec3::norm(vec3::sub(a.center, b.center));
                if dist <= a.max_radius() + b.max_radius() {
                    return Err(Error::OverlapDetected {
                        first: i,
                        second: j,
                    });
                }
            }
        }
        Ok(())
    }

    /// Sum of component volumes; fails when disjointness is not certified.
    pub fn total_volume(&self) -> Result<f64> {
        self.validate()?;
        Ok(self.volume_unchecked())
    }

    pub(crate) fn volume_unchecked(&self) -> f64 {
        self.components.iter().map(StarShape::volume).sum()
    }

    pub fn dilate(&self, t: f64) -> Result<Self> {
        Ok(Configuration {
            components: self
                .components
                .iter()
                .map(|c| c.dilate(t))
                .collect::<Result<_>>()?,
        })
    }
}

pub fn total_volume(config: &Configuration) -> Result<f64> {
    config.total_volume()
}

/// Physical parameters of `E_γ = P_a + γ V` with `a(x) = |x|^p`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyParams {
    pub d: usize,
    pub p: f64,
    pub alpha: f64,
    pub gamma: f64,
    #[serde(default)]
    pub lambda: f64,
}

impl EnergyParams {
    pub fn new(d: usize, p: f64, alpha: f64, gamma: f64) -> Result<Self> {
        let params = EnergyParams {
            d,
            p,
            alpha,
            gamma,
            lambda: 0.0,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn with_gamma(self, gamma: f64) -> Self {
        EnergyParams { gamma, ..self }
    }

    pub fn with_lambda(self, lambda: f64) -> Self {
        EnergyParams { lambda, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.d != 2 && self.d != 3 {
            return Err(Error::UnsupportedDimension(self.d));
        }
        if !(self.alpha > 0.0 && self.alpha < self.d as f64) {
            return Err(Error::InvalidParameter {
                name: "alpha",
                value: self.alpha,
                constraint: "must lie in (0, d)",
            });
        }
        if !(self.p >= 0.0) || !self.p.is_finite() {
            return Err(Error::InvalidParameter {
                name: "p",
                value: self.p,
                constraint: "must be >= 0",
            });
        }
        if !(self.gamma >= 0.0) || !self.gamma.is_finite() {
            return Err(Error::InvalidParameter {
                name: "gamma",
                value: self.gamma,
                constraint: "must be >= 0",
            });
        }
        if !(self.lambda >= 0.0) || !self.lambda.is_finite() {
            return Err(Error::InvalidParameter {
                name: "lambda",
                value: self.lambda,
                constraint: "must be >= 0",
            });
        }
        Ok(())
    }
}
