//! Riemann zeta on the real line, for the singular-quadrature correction.

use std::f64::consts::PI;

use statrs::function::gamma::gamma;

// B_{2j} / (2j)!
const BERNOULLI_OVER_FACTORIAL: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 720.0,
    1.0 / 30240.0,
    -1.0 / 1209600.0,
    1.0 / 47900160.0,
    -691.0 / 1307674368000.0,
    1.0 / 74724249600.0,
];

/// `ζ(s)` for `s > 0`, `s ≠ 1`, by Euler–Maclaurin summation.
fn zeta_right(s: f64) -> f64 {
    const N: usize = 12;
    let n = N as f64;
    let mut sum: f64 = (1..N).map(|k| (k as f64).powf(-s)).sum();
    sum += n.powf(1.0 - s) / (s - 1.0) + 0.5 * n.powf(-s);
    let mut rising = s;
    let mut power = n.powf(-s - 1.0);
    for (j, b) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
        sum += b * rising * power;
        let k = 2.0 * j as f64;
        rising *= (s + k + 1.0) * (s + k + 2.0);
        power /= n * n;
    }
    sum
}

/// `ζ(s)` for real `s ≠ 1` (reflection formula for `s < 0`).
pub fn zeta(s: f64) -> f64 {
    if s > 0.0 && s != 1.0 {
        zeta_right(s)
    } else if s < 0.0 {
        2f64.powf(s) * PI.powf(s - 1.0) * (PI * s / 2.0).sin() * gamma(1.0 - s) * zeta_right(1.0 - s)
    } else if s == 0.0 {
        -0.5
    } else {
        panic!("zeta has a pole at s = 1")
    }
}
