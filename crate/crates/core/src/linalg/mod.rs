//! Dense complex linear algebra: matrices, the Hermitian eigensolver,
//! operator norms and functions of Hermitian matrices.

mod eigen;
mod matrix;

pub use eigen::{
    apply_function, hermitian_eigen, operator_norm, singular_values, EigenDecomposition,
    HermitianOperator, CLUSTER_GAP, HERMITIAN_TOL, MAX_SWEEPS, OFF_DIAGONAL_TOL,
};
pub use matrix::{axpy_sub, inner, norm, normalized, ComplexMatrix, I, ONE, ZERO};
