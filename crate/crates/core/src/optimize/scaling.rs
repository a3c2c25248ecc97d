//! The γ ↔ mass correspondence.
//!
//! For `|Ω| = 1`, `E_1(m^{1/d} Ω) = m^{(d−1+p)/d} E_γ(Ω)` with
//! `γ = m^{−(p+α−d−1)/d}`. The map degenerates at `p* = d − α + 1`.

use serde::{Deserialize, Serialize};

use crate::energy::evaluate;
use crate::geometry::{Configuration, EnergyParams};
use crate::{Error, Result};

/// `p* = d − α + 1`.
pub fn critical_exponent(d: usize, alpha: f64) -> f64 {
    d as f64 - alpha + 1.0
}

/// Exponent `e` in `γ = m^e`, i.e. `−(p+α−d−1)/d`.
pub fn gamma_exponent(params: &EnergyParams) -> Result<f64> {
    let e = -(params.p + params.alpha - params.d as f64 - 1.0) / params.d as f64;
    if e == 0.0 {
        return Err(Error::CriticalExponent { p: params.p });
    }
    Ok(e)
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value: v,
            constraint: "must be positive",
        })
    }
}

/// `m = γ^{−d/(p+α−d−1)}`.
pub fn gamma_to_mass(gamma: f64, params: &EnergyParams) -> Result<f64> {
    positive("gamma", gamma)?;
    Ok(gamma.powf(1.0 / gamma_exponent(params)?))
}

/// `γ = m^{−(p+α−d−1)/d}`.
pub fn mass_to_gamma(m: f64, params: &EnergyParams) -> Result<f64> {
    positive("m", m)?;
    Ok(m.powf(gamma_exponent(params)?))
}

/// Energy ratio `E_1(m^{1/d}Ω) / E_γ(Ω) = m^{(d−1+p)/d}`.
pub fn energy_factor(m: f64, params: &EnergyParams) -> f64 {
    m.powf((params.d as f64 - 1.0 + params.p) / params.d as f64)
}

/// Both sides of `E_1(m^{1/d}Ω) = m^{(d−1+p)/d} E_γ(Ω)` at `m = m(γ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingIdentity {
    pub m: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// `|lhs − rhs| / |rhs|`.
    pub residual: f64,
}

/// Evaluates the scaling identity for a unit-volume configuration.
pub fn scaling_identity(config: &Configuration, params: &EnergyParams) -> Result<ScalingIdentity> {
    let vol = config.total_volume()?;
    if (vol - 1.0).abs() > 1e-8 {
        return Err(Error::InvalidParameter {
            name: "volume",
            value: vol,
            constraint: "the identity is stated for unit volume",
        });
    }
    let m = gamma_to_mass(params.gamma, params)?;
    let scaled = config.dilate(m.powf(1.0 / params.d as f64))?;
    let lhs = evaluate(&scaled, &params.with_gamma(1.0))?.total;
    let rhs = energy_factor(m, params) * evaluate(config, params)?.total;
    Ok(ScalingIdentity {
        m,
        lhs,
        rhs,
        residual: (lhs - rhs).abs() / rhs.abs(),
    })
}
