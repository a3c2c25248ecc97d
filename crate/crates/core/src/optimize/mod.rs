//! Volume-constrained minimization, the γ ↔ mass scaling map and γ sweeps.

mod gradient;
mod minimize;
mod scaling;
mod sweep;

pub use gradient::shape_gradient;
pub use minimize::{
    initial_configuration, minimize, stationarity, ConstraintMode, InitSpec, Minimization,
    OptimizerOptions, Status, PENALTY_SMOOTHING,
};
pub use scaling::{
    critical_exponent, energy_factor, gamma_exponent, gamma_to_mass, mass_to_gamma, scaling_identity, ScalingIdentity,
};
pub use sweep::{asphericity, better, sweep_gamma, write_sweep_csv, SweepRecord, SWEEP_CSV_HEADER, TIE_TOLERANCE};
