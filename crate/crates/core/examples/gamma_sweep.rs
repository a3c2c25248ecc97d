//! Sweeps γ over six decades and prints the recorded minimizer summaries.
//!
//! `cargo run --release --example gamma_sweep`

use isoshape::geometry::EnergyParams;
use isoshape::optimize::{sweep_gamma, InitSpec, OptimizerOptions};

fn main() -> isoshape::Result<()> {
    let gammas: Vec<f64> = (0..=10).map(|i| 10f64.powf(-3.0 + 0.5 * i as f64)).collect();
    let params = EnergyParams::new(2, 2.0, 1.0, gammas[0])?;
    let opts = OptimizerOptions {
        init: InitSpec::PerturbedBall { eps: 0.2, mode: 2 },
        ..Default::default()
    };
    let runs = sweep_gamma(&gammas, &params, 128, &opts)?;
    println!("gamma energy asphericity components iterations status");
    for m in &runs {
        let r = &m.record;
        println!(
            "{:<10.3e} {:<18.12} {:<10.3e} {} {:>5} {:?}",
            r.gamma, r.energy, r.asphericity, r.n_components, r.iterations, m.status
        );
    }
    for w in runs.windows(3) {
        let (a, b, c) = (&w[0].record, &w[1].record, &w[2].record);
        let chord = a.energy + (c.energy - a.energy) * (b.gamma - a.gamma) / (c.gamma - a.gamma);
        println!("concavity margin at {:.3e}: {:.3e}", b.gamma, b.energy - chord);
    }
    Ok(())
}
