//! Star-shaped sets as radial graphs over sphere quadrature grids.

mod filter;
mod gauss;
mod grid;
mod interp;
pub mod io;
mod shape;
pub mod vec3;

pub use gauss::{gauss_legendre, gauss_legendre_unit};
pub use grid::{
    h1_norm_sq, make_grid, sphere_area, tangential_gradient, unit_ball_volume, GridKind, SphereGrid,
    TangentStencil, MIN_RESOLUTION,
};
pub use shape::{
    ball_radius_for_volume, dilate, make_ball, total_volume, unit_volume_radius, volume,
    Configuration, EnergyParams, StarShape, R_MIN,
};
pub use vec3::Vec3;
