//! Decomposition of anharmonic (quartic) vibrational Hamiltonians into
//! Bogoliubov-solvable fragments, Trotterized propagation and eigenenergy
//! extraction in truncated Fock space, and compilation of fragment
//! propagators into elementary bosonic gate sequences.

pub mod algebra;
pub mod bogoliubov;
pub mod focksim;
pub mod fragmentation;
pub mod gates;
pub mod io;
pub mod linalg;
pub mod model;
pub mod optimize;
pub mod pauli;
pub mod pipeline;

use thiserror::Error as ThisError;

#[derive(Debug, ThisError)]
pub enum Error {
    #[error("mode index {mode} out of range for {n_modes} modes")]
    ModeOutOfRange { mode: usize, n_modes: usize },
    #[error("mode count mismatch: {0} vs {1}")]
    ModeCountMismatch(usize, usize),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("polynomial degree {got} exceeds the supported maximum {max}")]
    DegreeTooHigh { got: usize, max: usize },
    #[error("matrix function failed: {0}")]
    MatrixFunction(String),
    #[error("matrix logarithm branch failure: eigenvalue on the negative real axis")]
    LogBranch,
    #[error("transform is not symplectic: residual {0:.3e}")]
    NotSymplectic(f64),
    #[error("Bloch-Messiah factorization failure: reconstruction residual {0:.3e}")]
    Factorization(f64),
    #[error("gate compilation refused: {0}")]
    CompileRefused(String),
    #[error("Fock dimension {0} exceeds the supported limit {1}")]
    DimensionOverflow(usize, usize),
    #[error("Fock cutoff too small: truncated tail mass {0:.3e}")]
    CutoffTooSmall(f64),
    #[error("eigensolver failure: {0}")]
    Eigensolver(String),
    #[error("degenerate levels: E1 - E0 = {0:.3e}")]
    DegenerateSplitting(f64),
    #[error("eigenphase branch violation: {0}")]
    PhaseBranch(String),
    #[error("eigenvector overlap matching ambiguous: max overlap {0:.3} < 0.5")]
    OverlapAmbiguous(f64),
    #[error("qubit count {0} exceeds the supported limit {1}")]
    QubitOverflow(usize, usize),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("tolerance not met: {0}")]
    ToleranceNotMet(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
