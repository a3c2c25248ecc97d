//! Relaxes perturbed balls at small γ and reports how close each result is
//! to the unit-volume ball centered at the origin.
//!
//! `cargo run --release --example minimize_perturbed`

use std::sync::Arc;
use std::time::Instant;

use isoshape::energy::evaluate;
use isoshape::geometry::{make_ball, make_grid, unit_volume_radius, Configuration, EnergyParams};
use isoshape::optimize::{initial_configuration, minimize, InitSpec, OptimizerOptions};

fn main() -> isoshape::Result<()> {
    let n = 128;
    let params = EnergyParams::new(2, 2.0, 1.0, 0.01)?;
    let ball = make_ball(unit_volume_radius(2), &[0.0, 0.0], Arc::new(make_grid(2, n)?))?;
    let e_ball = evaluate(&Configuration::single(ball), &params)?.total;
    println!("ball energy {e_ball:.12}");
    for mode in 2..=6 {
        let opts = OptimizerOptions {
            init: InitSpec::PerturbedBall { eps: 0.2, mode },
            seed: mode as u64,
            ..Default::default()
        };
        let init = initial_configuration(&opts.init, 2, n, 1.0, opts.seed)?;
        let start = Instant::now();
        let m = minimize(&init, &params, &opts)?;
        println!(
            "mode {mode}: E = {:.12} (diff {:.2e}), asphericity {:.2e}, {} iterations, {:?}, |g| {:.1e}, {:.2?}",
            m.record.energy,
            m.record.energy - e_ball,
            m.record.asphericity,
            m.record.iterations,
            m.status,
            m.gradient_norm,
            start.elapsed()
        );
    }
    Ok(())
}
