//! Energy functionals: weighted perimeter, Riesz energies and potentials,
//! total and penalized energies.

mod epstein;
pub mod perimeter;
pub mod potential;
pub mod riesz;
pub mod sum;
pub mod volume_quad;
mod zeta;

use serde::{Deserialize, Serialize};

pub use perimeter::{density, density_gradient, perimeter_gradient, weighted_perimeter};
pub use potential::{potential, potential_shape, riesz_boundary_derivative, PotentialSurface};
pub use riesz::{interaction, riesz_config, riesz_gradient, riesz_self, ComponentGradient, RieszValue};
pub use volume_quad::VolumeQuadrature;
pub use zeta::zeta;

use crate::geometry::{Configuration, EnergyParams};
use crate::{Error, Result};

/// Evaluator for the Riesz term.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub enum RieszMethod {
    /// Double boundary integral (default, differentiable).
    #[default]
    Boundary,
    /// Desingularized volume quadrature with Richardson extrapolation.
    Volume,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct RieszQuadrature {
    pub method: RieszMethod,
    /// Relative error tolerance; exceeding it is an error.
    pub tolerance: Option<f64>,
}

/// All terms of `E_γ` for one configuration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    pub volume: f64,
    pub perimeter: f64,
    pub riesz: f64,
    pub gamma: f64,
    /// `perimeter + gamma·riesz`.
    pub total: f64,
    /// `λ·| |Ω| − 1 |`, not included in `total`.
    pub penalty: f64,
    pub riesz_error_estimate: Option<f64>,
}

impl EnergyBreakdown {
    /// `F_γ^λ = total + penalty`.
    pub fn penalized(&self) -> f64 {
        self.total + self.penalty
    }
}

/// Riesz energy of a configuration by the selected method.
pub fn riesz_energy(config: &Configuration, alpha: f64, q: &RieszQuadrature) -> Result<RieszValue> {
    let v = match q.method {
        RieszMethod::Boundary => riesz_config(config, alpha)?,
        RieszMethod::Volume => {
            return VolumeQuadrature::from_configuration(config).riesz(alpha, q.tolerance);
        }
    };
    if let (Some(tol), Some(err)) = (q.tolerance, v.error) {
        if err > tol * v.value.abs() {
            return Err(Error::ExtrapolationUnstable {
                estimate: err,
                tolerance: tol * v.value.abs(),
            });
        }
    }
    Ok(v)
}

pub fn total_energy(
    config: &Configuration,
    params: &EnergyParams,
    q: &RieszQuadrature,
) -> Result<EnergyBreakdown> {
    params.validate()?;
    if let Some(d) = config.dim() {
        if d != params.d {
            return Err(Error::UnsupportedDimension(d));
        }
    }
    let volume = config.total_volume()?;
    let perimeter = sum::neumaier(
        config
            .components()
            .iter()
            .map(|s| weighted_perimeter(s, params.p)),
    );
    let v = riesz_energy(config, params.alpha, q)?;
    Ok(EnergyBreakdown {
        volume,
        perimeter,
        riesz: v.value,
        gamma: params.gamma,
        total: perimeter + params.gamma * v.value,
        penalty: params.lambda * (volume - 1.0).abs(),
        riesz_error_estimate: v.error,
    })
}

/// `total_energy` with the default boundary quadrature.
pub fn evaluate(config: &Configuration, params: &EnergyParams) -> Result<EnergyBreakdown> {
    total_energy(config, params, &RieszQuadrature::default())
}

/// `F_γ^λ(Ω) = E_γ(Ω) + λ | |Ω| − 1 |`.
pub fn penalized_energy(config: &Configuration, params: &EnergyParams) -> Result<f64> {
    Ok(evaluate(config, params)?.penalized())
}
