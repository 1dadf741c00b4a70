use thiserror::Error;

pub type Result<T, E = QslError> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QslError {
    #[error("malformed input: {0}")]
    Malformed(&'static str),

    #[error("matrix is not Hermitian (defect {defect:e})")]
    NotHermitian { defect: f64 },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("all basis vectors are numerically zero")]
    EmptySpan,

    #[error("operation needs a nonzero subspace")]
    EmptySubspace,

    #[error("subspace of rank {rank} in dimension {dim} has no proper block decomposition")]
    TrivialSubspace { rank: usize, dim: usize },

    #[error("state vector is not normalized (norm {norm})")]
    NonUnitInput { norm: f64 },

    #[error("theta {0} outside (0, pi/2]")]
    InvalidTheta(f64),

    #[error("two-level energies must differ")]
    DegenerateLevels,

    #[error("index {index} out of range for dimension {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),

    #[error("bound violated: {0}")]
    BoundViolation(BoundViolation),
}

/// A proven inequality that failed numerically: `lhs ≤ rhs` did not hold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundViolation {
    pub check: &'static str,
    pub lhs: f64,
    pub rhs: f64,
}

impl core::fmt::Display for BoundViolation {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{}: {:e} > {:e}", self.check, self.lhs, self.rhs)
    }
}
