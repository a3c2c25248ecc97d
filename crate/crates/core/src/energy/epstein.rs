//! Epstein zeta of rectangular unit-area lattices,
//! `Z_a(s) = Σ'_{m ∈ ℤ²} (a² m₁² + m₂²/a²)^{−s}`, by the Chowla–Selberg
//! expansion. These are the diagonal corrections of the product rule for
//! `|z|^{−2s}` on a locally rectangular grid.

use std::f64::consts::PI;

use statrs::function::gamma::gamma;

use super::zeta::zeta;

fn recip_gamma(s: f64) -> f64 {
    if s <= 0.0 && s == s.floor() {
        0.0
    } else {
        1.0 / gamma(s)
    }
}

/// `K_ν(x)` for `x ≥ 1` from `∫₀^∞ e^{−x cosh t} cosh(νt) dt`; the
/// trapezoidal rule converges geometrically for this analytic integrand.
fn bessel_k(nu: f64, x: f64) -> f64 {
    const H: f64 = 0.05;
    let mut sum = 0.5;
    let mut t = H;
    loop {
        let term = (-x * (t.cosh() - 1.0)).exp() * (nu * t).cosh();
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
        t += H;
    }
    H * sum * (-x).exp()
}

/// Double sum `Σ_{m,k ≥ 1} (m/k)^{1/2−s} K_{s−1/2}(2πkm/a²)` scaled by `a^{2s−1}`.
fn bessel_tail(a: f64, s: f64) -> f64 {
    let q = 2.0 * PI / (a * a);
    let mut total = 0.0;
    for m in 1.. {
        if (-q * m as f64).exp() < 1e-18 {
            break;
        }
        for k in 1.. {
            let x = q * (k * m) as f64;
            if (-x).exp() < 1e-18 {
                break;
            }
            total += (m as f64 / k as f64).powf(0.5 - s) * bessel_k(s - 0.5, x);
        }
    }
    total * a.powf(2.0 * s - 1.0)
}

fn chowla_selberg(a: f64, s: f64) -> f64 {
    let first = 2.0 * a.powf(-2.0 * s) * zeta(2.0 * s);
    let rg = recip_gamma(s);
    // Γ(s−½)ζ(2s−1) rewritten with the functional equation so that the
    // trivial zeros of ζ cancel the poles of Γ.
    let second = 2.0 * PI.powf(2.0 * s - 1.0) * gamma(1.0 - s) * zeta(2.0 - 2.0 * s) * a.powf(2.0 * s - 2.0) * rg;
    let third = 8.0 * PI.powf(s) * a.powf(-2.0 * s) * rg * bessel_tail(a, s);
    first + second + third
}

/// `Z_a(s)` for `s < 1/2` or `s > 1`.
pub fn epstein_rect(a: f64, s: f64) -> f64 {
    assert!(a > 0.0 && (s < 0.5 || s > 1.0), "epstein_rect({a}, {s})");
    chowla_selberg(a.min(1.0 / a), s)
}

/// `Z_a'(0)` by the Kronecker limit formula.
pub fn epstein_rect_derivative_at_zero(a: f64) -> f64 {
    let a = a.min(1.0 / a);
    let q = 2.0 * PI / (a * a);
    let mut tail = 0.0;
    for m in 1.. {
        let e = (-q * m as f64).exp();
        if e < 1e-18 {
            break;
        }
        tail += (-e).ln_1p();
    }
    2.0 * a.ln() - 2.0 * (2.0 * PI).ln() + PI / (3.0 * a * a) - 4.0 * tail
}
