//! Closed forms on balls: weighted perimeters `dω_d R^{d−1+p}`, the Riesz
//! energy of 3D balls, potentials at the center, and `E_γ` of the
//! unit-volume disk.
//!
//! `cargo run --release --example ball_energy`

use std::f64::consts::PI;
use std::sync::Arc;

use isoshape::energy::{evaluate, potential_shape, riesz_self, weighted_perimeter};
use isoshape::geometry::{make_ball, make_grid, sphere_area, unit_volume_radius, Configuration, EnergyParams};

fn main() -> isoshape::Result<()> {
    for d in [2, 3] {
        let grid = Arc::new(make_grid(d, if d == 2 { 64 } else { 16 })?);
        for r in [0.5, 1.0, 2.0] {
            let ball = make_ball(r, &vec![0.0; d], grid.clone())?;
            for p in [0.0, 1.0, 3.0] {
                let exact = sphere_area(d) * r.powf(d as f64 - 1.0 + p);
                let quad = weighted_perimeter(&ball, p);
                println!("d={d} R={r} p={p}: P_a {quad:.12} closed form {exact:.12} rel.err {:.1e}", (quad / exact - 1.0).abs());
            }
        }
    }

    // V(B_1) in R^3 from the lens volume π(16 − 12r + r³)/12 of two unit balls at distance r
    let grid = Arc::new(make_grid(3, 16)?);
    let ball = make_ball(1.0, &[0.0; 3], grid)?;
    println!();
    for alpha in [0.5, 1.0, 2.0, 2.5] {
        let exact = PI * PI / 3.0
            * (16.0 * 2f64.powf(3.0 - alpha) / (3.0 - alpha) - 12.0 * 2f64.powf(4.0 - alpha) / (4.0 - alpha)
                + 2f64.powf(6.0 - alpha) / (6.0 - alpha));
        let v = riesz_self(&ball, alpha)?;
        println!(
            "alpha={alpha}: V(B_1) {:.9} ± {:.1e}, closed form {exact:.9}, rel.err {:.1e}",
            v.value,
            v.error.unwrap_or(f64::NAN),
            (v.value / exact - 1.0).abs()
        );
        let center = potential_shape(&ball, &[0.0; 3], alpha)?;
        println!("           v(0) {center:.9}, closed form {:.9}", 4.0 * PI / (3.0 - alpha));
    }

    let r0 = unit_volume_radius(2);
    let disk = Configuration::single(make_ball(r0, &[0.0, 0.0], Arc::new(make_grid(2, 128)?))?);
    println!();
    for gamma in [0.0, 0.1, 1.0] {
        let e = evaluate(&disk, &EnergyParams::new(2, 1.0, 1.0, gamma)?)?;
        println!("unit disk, p=1, alpha=1, gamma={gamma}: P_a {:.12} V {:.10} E {:.10}", e.perimeter, e.riesz, e.total);
    }
    Ok(())
}
