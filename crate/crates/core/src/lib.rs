//! Shape optimization for the weighted nonlocal isoperimetric problem
//!
//! Minimize `P_a(Ω) + γ V(Ω)` over sets of fixed volume, where `P_a` is the
//! perimeter weighted by the radial density `a(x) = |x|^p` and `V` is the
//! Riesz self-interaction `∫∫ |x−y|^{−α}`.
//!
//! Candidate sets are unions of star-shaped components, each a radial graph
//! over a quadrature grid on the unit sphere (`d ∈ {2, 3}`).
//!
//! - [`geometry`]: sphere grids, star shapes, volumes, tangential gradients.
//! - [`energy`]: weighted perimeter, Riesz self/cross energies, potentials.
//! - [`optimize`]: shape gradients, volume-constrained descent, γ sweeps,
//!   the γ ↔ mass scaling map.
//! - [`fuglede`]: deficits of nearly spherical sets against the ball.
//! - [`oracle`]: rasterization and Monte Carlo ground truth, inequality checks.
//! - [`cli`]: configuration, orchestration and CSV/JSON/SVG output for the
//!   `isoshape` binary.

pub mod cli;
pub mod energy;
pub mod error;
pub mod fuglede;
pub mod geometry;
pub mod optimize;
pub mod oracle;

pub use error::{Error, Result};
