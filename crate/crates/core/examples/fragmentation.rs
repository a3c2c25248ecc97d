//! Compares optimized one- and two-component candidates at large γ.
//!
//! `cargo run --release --example fragmentation`

use std::time::Instant;

use isoshape::geometry::EnergyParams;
use isoshape::optimize::{initial_configuration, minimize, InitSpec, OptimizerOptions};

fn main() -> isoshape::Result<()> {
    let n = 128;
    let params = EnergyParams::new(2, 2.0, 1.0, 100.0)?;
    let inits = [
        InitSpec::Ball,
        InitSpec::PerturbedBall { eps: 0.2, mode: 2 },
        InitSpec::PerturbedBall { eps: 0.3, mode: 3 },
        InitSpec::Multiball { count: 2, spacing: 1.0 },
        InitSpec::Multiball { count: 2, spacing: 1.5 },
        InitSpec::Multiball { count: 3, spacing: 1.2 },
    ];
    for (seed, init) in inits.iter().enumerate() {
        let opts = OptimizerOptions {
            init: *init,
            seed: seed as u64,
            ..Default::default()
        };
        let cfg = initial_configuration(init, 2, n, 1.0, opts.seed)?;
        let start = Instant::now();
        let m = minimize(&cfg, &params, &opts)?;
        let centers: Vec<_> = m.config.components().iter().map(|s| s.center().to_vec()).collect();
        println!(
            "{init:?}: E = {:.8} per {:.6} V {:.6} asph {:.3e} it {} {:?} |g| {:.1e} {:.2?} centers {:?}",
            m.record.energy,
            m.record.perimeter,
            m.record.riesz,
            m.record.asphericity,
            m.record.iterations,
            m.status,
            m.gradient_norm,
            start.elapsed(),
            centers
        );
    }
    Ok(())
}
