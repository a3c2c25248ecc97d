//! The Riesz energy of one shape by three independent routes: the boundary
//! double integral, the desingularized volume quadrature, and Monte Carlo.
//!
//! `cargo run --release --example riesz_routes`

use std::sync::Arc;
use std::time::Instant;

use isoshape::energy::{riesz_self, VolumeQuadrature};
use isoshape::geometry::{make_grid, StarShape};
use isoshape::oracle::mc_riesz;

fn main() -> isoshape::Result<()> {
    for (d, n) in [(2, 128), (3, 24)] {
        let grid = Arc::new(make_grid(d, n)?);
        let radii = grid
            .nodes()
            .iter()
            .map(|x| 0.7 * (0.15 * (3.0 * x[0] * x[0] - 1.0) + 0.1 * x[1]).exp())
            .collect();
        let shape = StarShape::new(grid, &vec![0.1; d], radii)?;
        println!("d={d}, volume {:.6}", shape.volume());
        for alpha in [0.5, 1.0, 1.5] {
            let t = Instant::now();
            let b = riesz_self(&shape, alpha)?;
            let tb = t.elapsed();
            let t = Instant::now();
            let v = VolumeQuadrature::new(&shape).riesz(alpha, None)?;
            let tv = t.elapsed();
            let t = Instant::now();
            let mc = mc_riesz(&shape, None, alpha, 4_000_000, 7)?;
            let tm = t.elapsed();
            println!(
                "  alpha={alpha}: boundary {:.8} ± {:.1e} ({tb:.2?}) | volume {:.6} ± {:.1e} ({tv:.2?}) | MC {:.5} ± {:.1e} ({tm:.2?})",
                b.value,
                b.error.unwrap_or(f64::NAN),
                v.value,
                v.error.unwrap_or(f64::NAN),
                mc.estimate,
                mc.std_error
            );
        }
    }
    Ok(())
}
