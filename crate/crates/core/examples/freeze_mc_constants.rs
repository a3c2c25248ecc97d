//! Computes the Monte Carlo reference values that the test suite freezes:
//! `V(B₁)` in the plane with `α = 1`, and the Riesz deficit per `‖u‖²_{H¹}`
//! of the mode `u = ε cos 2θ` at two amplitudes.
//!
//! `cargo run --release --example freeze_mc_constants [samples]`

use std::sync::Arc;
use std::time::Instant;

use isoshape::fuglede::{h1_norm_sq, riesz_deficit, shape_from_perturbation, Perturbation};
use isoshape::geometry::{ball_radius_for_volume, make_ball, make_grid};
use isoshape::oracle::{mc_riesz, mc_riesz_difference};

fn main() -> isoshape::Result<()> {
    let samples: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(100_000_000);
    let grid = Arc::new(make_grid(2, 256)?);
    let b1 = make_ball(1.0, &[0.0, 0.0], grid.clone())?;

    let start = Instant::now();
    let v = mc_riesz(&b1, None, 1.0, samples, 2024)?;
    println!(
        "V(B1) = {:.8} ± {:.2e} ({} samples, {:.1?}); 16π/3 = {:.8}",
        v.estimate,
        v.std_error,
        v.samples,
        start.elapsed(),
        16.0 * std::f64::consts::PI / 3.0
    );

    for eps in [0.05, 0.025] {
        let u = Perturbation::mode(grid.clone(), 2, eps, 1.0, 2.0)?;
        let shape = shape_from_perturbation(&u)?;
        let ball = make_ball(ball_radius_for_volume(2, shape.volume()), &[0.0, 0.0], grid.clone())?;
        let h1 = h1_norm_sq(&u);
        let mc = mc_riesz_difference(&shape, &ball, 1.0, samples, 7)?;
        let quad = riesz_deficit(&u, 1.0)?;
        println!(
            "eps {eps}: MC deficit/|u|² = {:.6} ± {:.2e}, quadrature {:.6} ± {:.1e}",
            mc.estimate / h1,
            mc.std_error / h1,
            quad.value / h1,
            quad.error / h1
        );
    }
    Ok(())
}
