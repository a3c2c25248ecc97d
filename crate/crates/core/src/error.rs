use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported dimension {0}: only d = 2 and d = 3 are implemented")]
    UnsupportedDimension(usize),

    #[error("grid resolution {n} is too small (minimum {min})")]
    ResolutionTooSmall { n: usize, min: usize },

    #[error("radius {radius:e} is below the radial floor {floor:e}")]
    RadiusBelowFloor { radius: f64, floor: f64 },

    #[error("radial sample {index} is not finite")]
    NonFiniteRadius { index: usize },

    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("scale factor must be positive, got {0}")]
    ScaleNonPositive(f64),

    #[error("components {first} and {second} may overlap (bounding spheres intersect)")]
    OverlapDetected { first: usize, second: usize },

    #[error("invalid parameter {name} = {value}: {constraint}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        constraint: &'static str,
    },

    #[error("Riesz error estimate {estimate:e} exceeds tolerance {tolerance:e}")]
    ExtrapolationUnstable { estimate: f64, tolerance: f64 },

    #[error("graph condition violated: min(1 + u) = {min_one_plus_u} (need {required})")]
    GraphConditionViolated { min_one_plus_u: f64, required: f64 },

    #[error("perturbation mean {mean:e} is not zero")]
    NonZeroMean { mean: f64 },

    #[error("p = {p} equals the critical exponent d - alpha + 1; the gamma <-> mass map is undefined")]
    CriticalExponent { p: f64 },

    #[error("raster has only {occupied} occupied cells (need at least {required})")]
    ResolutionTooCoarse { occupied: usize, required: usize },

    #[error("degenerate check: {0}")]
    Degenerate(String),

    #[error("mass precondition violated: |E| = {mass} > 1")]
    MassPreconditionViolated { mass: f64 },

    #[error("ball B_{radius}({x:?}, {y:?}) leaves the raster bounds")]
    OutOfBounds { x: f64, y: f64, radius: f64 },

    #[error("grids of the two shapes differ")]
    GridMismatch,

    #[error("invalid shape file: {0}")]
    ShapeFile(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
