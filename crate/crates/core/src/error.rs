use thiserror::Error;

use crate::eigensolver::EigenResult;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("lattice dimensions too small: nx = {nx} (need >= 3), ny = {ny} (need >= 1)")]
    DimensionTooSmall { nx: usize, ny: usize },

    #[error("operation needs an odd number of rows, got ny = {0}")]
    EvenRows(usize),

    #[error("row {row} is the center row of a Möbius lattice; use the center loop")]
    CenterRow { row: usize },

    #[error("row {row} out of range for ny = {ny}")]
    RowOutOfRange { row: usize, ny: usize },

    #[error("operation requires a Möbius lattice with odd ny >= 3")]
    NotCuttable,

    #[error("invalid loop: {0}")]
    InvalidLoop(String),

    #[error("invalid face at ({i}, {j})")]
    InvalidFace { i: usize, j: usize },

    #[error("size mismatch: expected {expected}, got {got}")]
    SizeMismatch { expected: usize, got: usize },

    #[error("loops are not homologous: classes {0} and {1}")]
    NonHomologous(i64, i64),

    #[error("loop touches the cut curve (center row)")]
    LoopTouchesCut,

    #[error("Hamiltonian is not reflection symmetric: cross-block magnitude {0:e}")]
    SymmetryViolation(f64),

    #[error("matrix dimension {0} exceeds the dense solver limit")]
    DimensionTooLarge(usize),

    #[error("invalid solver configuration: {0}")]
    InvalidSolverConfig(String),

    #[error("dense eigensolver failed: {0}")]
    DenseSolver(String),

    #[error("Lanczos did not converge after {iterations} iterations (max residual {max_residual:e})")]
    NoConvergence {
        iterations: usize,
        max_residual: f64,
        best: Box<EigenResult>,
    },

    #[error("invalid sweep configuration: {0}")]
    InvalidSweep(String),

    #[error("need at least 3 records, got {0}")]
    TooFewPoints(usize),

    #[error("flux grid is not uniform")]
    NonUniformGrid,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
