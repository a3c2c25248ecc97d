use crate::energy::{perimeter_gradient, riesz_gradient, ComponentGradient};
use crate::geometry::vec3;
use crate::geometry::{Configuration, EnergyParams};
use crate::Result;

/// Gradient of the discrete `E_γ = P_a + γV` with respect to every radial
/// sample and every center.
pub fn shape_gradient(config: &Configuration, params: &EnergyParams) -> Result<Vec<ComponentGradient>> {
    params.validate()?;
    let mut out: Vec<ComponentGradient> = config
        .components()
        .iter()
        .map(|s| {
            let (dr, dc) = perimeter_gradient(s, params.p);
            ComponentGradient { dr, dc }
        })
        .collect();
    if params.gamma != 0.0 {
        for (o, r) in out.iter_mut().zip(riesz_gradient(config, params.alpha)?) {
            for (a, b) in o.dr.iter_mut().zip(&r.dr) {
                *a += params.gamma * b;
            }
            vec3::axpy(&mut o.dc, params.gamma, r.dc);
        }
    }
    Ok(out)
}
