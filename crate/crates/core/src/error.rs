//! Error type shared across the library.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("antisymmetry violated at (alpha={alpha}, beta={beta}, gamma={gamma}): residual {residual:.3e}")]
    AntisymmetryViolation {
        alpha: usize,
        beta: usize,
        gamma: usize,
        residual: f64,
    },
    #[error("Jacobi identity violated at (beta={beta}, gamma={gamma}, delta={delta}): residual {residual:.3e}")]
    JacobiViolation {
        beta: usize,
        gamma: usize,
        delta: usize,
        residual: f64,
    },
    #[error("metric is degenerate: |det g| = {det:.3e} <= {tol:.3e}")]
    DegenerateMetric { det: f64, tol: f64 },
    #[error("matrix basis commutator mismatch at (beta={beta}, gamma={gamma}): residual {residual:.3e}")]
    BasisMismatch {
        beta: usize,
        gamma: usize,
        residual: f64,
    },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("algebra has no matrix basis")]
    NoMatrixBasis,
    #[error("matrix logarithm outside principal-branch domain: {0}")]
    LogDomain(String),
    #[error("multi-index {lower:?} is not dominated by {upper:?}")]
    IndexNotDominated {
        upper: Vec<usize>,
        lower: Vec<usize>,
    },
    #[error("stencil for derivative order {order} too wide on axis {axis} ({size} nodes, max supported order {max_order})")]
    StencilTooWide {
        axis: usize,
        order: usize,
        size: usize,
        max_order: usize,
    },
    #[error("Lagrangian evaluated to a non-finite value at node {node:?}")]
    NonFiniteLagrangian { node: Vec<usize> },
    #[error("metric is not bi-invariant: detector residual {residual:.3e}")]
    NotBiInvariant { residual: f64 },
    #[error("reduced field is not flat: defect {defect:.6e} > tolerance {tol:.6e} at node {node:?}")]
    NotFlat {
        defect: f64,
        tol: f64,
        node: Vec<usize>,
    },
    #[error("line search stalled at iteration {iter}: no Armijo step above {min_step:.3e}")]
    LineSearchStalled { iter: usize, min_step: f64 },
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("boundary data incompatible with field: deviation {deviation:.3e} at node {node:?}")]
    BoundaryMismatch { deviation: f64, node: Vec<usize> },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
