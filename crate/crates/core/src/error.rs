use thiserror::Error;

use crate::grid::ComplexField;
use crate::minimize::WaveSolution;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("expected {expected} values, found {found}")]
    ShapeMismatch { expected: usize, found: usize },
    #[error("field contains non-finite values")]
    NonFinite,
    #[error("per-row x-mean {mean:.3e} exceeds tolerance {tol:.3e}")]
    NonZeroXMean { mean: f64, tol: f64 },
    #[error("invalid nonlinearity: {0}")]
    InvalidNonlinearity(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("field is independent of x1 (x1-kinetic {0:.3e}); no speed is identifiable")]
    DegenerateDirection(f64),
    #[error("modulus {min:.3e} falls below {threshold:.3e}; vortex suspected")]
    ModulusTooSmall { min: f64, threshold: f64 },
    #[error("phase winds {winding} times along a period of axis x{axis}")]
    NonzeroWinding { axis: usize, winding: i64 },
    #[error("modulus {0:.3e} is not positive")]
    RhoNonpositive(f64),
    #[error("V changes sign; use problem=sharp")]
    PotentialNotNonnegative(f64),
    #[error("V is nonnegative everywhere; no stationary bubble exists")]
    PotentialNonnegativeEverywhere,
    #[error("kinetic constraint {k} is not below the admissible bound {limit}")]
    KineticAboveKInfinity { k: f64, limit: f64 },
    #[error("kinetic multiplier {theta:.6e} is nonnegative; no speed")]
    MultiplierNonnegative {
        theta: f64,
        best: Box<WaveSolution>,
    },
    #[error("not converged after {iterations} iterations (relative residual {residual:.3e})")]
    NotConverged {
        iterations: usize,
        residual: f64,
        best: Box<WaveSolution>,
    },
    #[error("line search underflow at the V = 0 barrier after {iterations} iterations")]
    PotentialBarrierStuck {
        iterations: usize,
        barrier: Box<ComplexField>,
    },
    #[error("iteration diverged: {0}")]
    IterationDiverged(String),
    #[error("x-mean contamination {0:.3e} above tolerance")]
    ZeroModeContamination(f64),
    #[error("bad field file: {0}")]
    Format(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
