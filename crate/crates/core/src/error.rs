use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("argument {arg} lies within {radius:e} of a lattice pole")]
    PoleProximity { arg: String, radius: f64 },

    #[error("series `{what}` did not converge within {terms} terms")]
    NonConvergence { what: &'static str, terms: usize },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("quadrature oracle is inconsistent with a diagonal action: {0}")]
    OracleInconsistency(String),

    #[error("field has non-zero mean {mean:e}")]
    NonZeroMean { mean: f64 },

    #[error("solution blew up at t = {t}: max |field| = {max_abs:e}")]
    BlowUp { t: f64, max_abs: f64 },

    #[error("time step violates the stability guard: {0}")]
    StepGuard(String),

    #[error("particles {i} and {j} collided (gap {gap:e})")]
    Collision { i: usize, j: usize, gap: f64 },

    #[error("poles {i} and {j} collided (distance {distance:e})")]
    PoleCollision { i: usize, j: usize, distance: f64 },

    #[error("pole {index} crossed the real axis (Im = {imag:e})")]
    RealAxisCrossing { index: usize, imag: f64 },

    #[error("grid node pair hits a pole of the pair potential: {0}")]
    PoleOnGrid(String),

    #[error("operator dimension {dim} exceeds the cap {cap}")]
    DimensionCap { dim: usize, cap: usize },
}
