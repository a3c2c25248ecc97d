//! The γ ↔ mass correspondence: both sides of
//! `E_1(m^{1/d}Ω) = m^{(d−1+p)/d} E_γ(Ω)` for a few shapes and exponents.
//!
//! `cargo run --release --example scaling_correspondence`

use std::sync::Arc;

use isoshape::geometry::{make_grid, Configuration, EnergyParams, StarShape};
use isoshape::optimize::{critical_exponent, gamma_to_mass, mass_to_gamma, scaling_identity};

fn main() -> isoshape::Result<()> {
    let grid = Arc::new(make_grid(2, 128)?);
    let radii: Vec<f64> = grid.nodes().iter().map(|x| 1.0 + 0.2 * x[0] * x[1] - 0.1 * x[0]).collect();
    let shape = StarShape::new(grid, &[0.05, -0.1], radii)?;
    let t = shape.volume().powf(-0.5);
    let unit = Configuration::single(shape.dilate(t)?);
    println!("unit-volume shape, volume {:.15}", unit.total_volume()?);
    println!("p*(d=2, alpha=1) = {}", critical_exponent(2, 1.0));
    for p in [0.5, 1.0, 3.0] {
        for alpha in [0.5, 1.0] {
            for gamma in [0.1, 1.0, 10.0] {
                let params = EnergyParams::new(2, p, alpha, gamma)?;
                let m = gamma_to_mass(gamma, &params)?;
                let back = mass_to_gamma(m, &params)?;
                let s = scaling_identity(&unit, &params)?;
                println!(
                    "p={p} alpha={alpha} gamma={gamma}: m {m:.6e} (gamma back {back:.3e}) lhs {:.12e} rhs {:.12e} residual {:.1e}",
                    s.lhs, s.rhs, s.residual
                );
            }
        }
    }
    Ok(())
}
