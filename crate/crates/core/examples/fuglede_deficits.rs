//! Perimeter and Riesz deficits of nearly circular sets `r = 1 + ε cos kθ`,
//! their `ε²` scaling, and the threshold `γ̂` where the ball stops winning.

use std::sync::Arc;

use isoshape::fuglede::{
    circle_mode_deficit_coefficient, deficit_suite, h1_norm_sq, i1_i2_split, perimeter_deficit,
    riesz_deficit, threshold_gamma, write_deficit_csv, ComparisonBall, Perturbation,
};
use isoshape::geometry::make_grid;

fn main() -> isoshape::Result<()> {
    let (p, alpha) = (2.0, 1.0);
    let grid = Arc::new(make_grid(2, 256)?);

    println!("deficit/eps^2 against B_R, Richardson over eps = 1e-2, 5e-3, 2.5e-3");
    for k in 2..=5 {
        let q = |eps: f64| -> isoshape::Result<f64> {
            let u = Perturbation::mode(grid.clone(), k, eps, 1.0, p)?;
            Ok(perimeter_deficit(&u, ComparisonBall::BaseRadius)? / (eps * eps))
        };
        let (a, b, c) = (q(1e-2)?, q(5e-3)?, q(2.5e-3)?);
        // quotient error is O(eps^2): eliminate it with ratio 4
        let (r1, r2) = ((4.0 * b - a) / 3.0, (4.0 * c - b) / 3.0);
        let exact = circle_mode_deficit_coefficient(k, 1.0, p);
        println!(
            "k={k}  limit {r2:.9}  series {exact:.9}  rel.err {:.1e}  residual {:.1e}",
            (r2 - exact).abs() / exact,
            (r2 - r1).abs() / r2
        );
    }

    println!("\nsplit against the volume-matched ball, eps = 0.05");
    for k in 2..=5 {
        let u = Perturbation::mode(grid.clone(), k, 0.05, 1.0, p)?;
        let (i1, i2) = i1_i2_split(&u, ComparisonBall::VolumeMatched)?;
        let rd = riesz_deficit(&u, alpha)?;
        println!(
            "k={k}  I1 {i1:.6e}  I2 {i2:.6e}  riesz {:.6e} ± {:.1e}  |u|_H1^2 {:.6e}",
            rd.value,
            rd.error,
            h1_norm_sq(&u)
        );
    }

    let u = Perturbation::mode(grid.clone(), 2, 0.05, 1.0, p)?;
    let g = threshold_gamma(&u, alpha, 1e-3, 1e3, 1e-10)?;
    println!("\nthreshold gamma for k=2, eps=0.05: {g:.6}");

    let rows = deficit_suite(2, 128, &[2, 3, 4], &[0.05, 0.025], 1.0, p, alpha)?;
    println!();
    write_deficit_csv(&rows, std::io::stdout().lock())
}
