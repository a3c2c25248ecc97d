//! Independent ground truth: planar rasters with Crofton perimeters, Monte
//! Carlo Riesz energies, and checkers for the inequalities behind the
//! existence and regularity theory.

mod checks;
mod corpus;
mod mc;
mod raster;

pub use raster::{
    perimeter_calibration, raster_measures, rasterize, rasterize_shape, Bounds, RasterMeasures, RasterSet,
    MIN_OCCUPIED,
};
pub use mc::{mc_riesz, mc_riesz_difference, McEstimate, Region, CHUNK, MIN_SAMPLES, TUPLE};
pub use checks::{
    c_bar, check_en_lower_bound, check_rel_isop, check_v_lipschitz, en_lower_bound_limit, lipschitz_constant,
    quasi_minimality, weighted_density, EnLowerBound, LipschitzCheck, QuasiMinimality, RelIsop,
};
pub use corpus::{
    density_diagnostic, en_lower_bound_report, lipschitz_corpus, mc_agreement_corpus, quasi_minimality_diagnostic,
    random_blob, raster_agreement_corpus, rel_isop_corpus, total_violations, verify, CheckReport, CorpusOptions,
};
