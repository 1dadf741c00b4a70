//! Orthogonal projectors and distances between the subspaces they represent.
//!
//! Three notions are provided: the gap `‖Q − R‖`, the maximal angle
//! `ϑ = arcsin ‖Q − R‖` (a metric) and the ordered relative angle
//! `φ(Q, R) = arcsin ‖Q^⊥ R‖`.
//!
//! Angles are returned through `atan2(sin, cos)`, with the sine read off the
//! spectrum of the projector difference and the cosine from the smallest
//! singular value of the overlap of orthonormal bases. Both are accurate to
//! roughly machine precision in absolute terms, so the angle stays accurate
//! near `π/2`, where `arcsin` of a rounded sine would lose half the digits.

use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{QslError, Result};
use crate::linalg::{
    axpy_sub, hermitian_eigen, inner, norm, singular_values, ComplexMatrix, ONE,
};

/// Hermiticity and idempotency tolerance for a valid projector.
pub const PROJECTOR_TOL: f64 = 1e-10;
/// Allowed distance between `trace(P)` and its rank.
pub const TRACE_TOL: f64 = 1e-8;
/// Relative residual below which a Gram–Schmidt candidate is dependent.
pub const RANK_TOL: f64 = 1e-10;
/// Gap values beyond `1 + CLAMP_WARN` are logged before clamping.
pub const CLAMP_WARN: f64 = 1e-8;

/// A user-supplied spanning set of a subspace of `C^dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceBasis {
    dim: usize,
    vectors: Vec<Vec<Complex64>>,
}

impl SubspaceBasis {
    pub fn new(dim: usize, vectors: Vec<Vec<Complex64>>) -> Result<Self> {
        if dim == 0 {
            return Err(QslError::Malformed("basis dimension must be positive"));
        }
        for v in &vectors {
            if v.len() != dim {
                return Err(QslError::DimensionMismatch { left: dim, right: v.len() });
            }
            if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(QslError::Malformed("non-finite basis entry"));
            }
        }
        Ok(Self { dim, vectors })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vectors(&self) -> &[Vec<Complex64>] {
        &self.vectors
    }
}

/// Hermitian idempotent `P`, stored together with an orthonormal basis of
/// its range (the columns of a `dim × rank` matrix).
#[derive(Debug, Clone, PartialEq)]
pub struct OrthogonalProjector {
    matrix: ComplexMatrix,
    basis: ComplexMatrix,
}

impl OrthogonalProjector {
    /// `P = W W*` for a matrix `W` with orthonormal columns.
    pub fn from_orthonormal_columns(basis: ComplexMatrix) -> Self {
        let matrix = basis.matmul(&basis.adjoint()).hermitian_part();
        Self { matrix, basis }
    }

    /// Validates an explicit projector matrix and extracts a range basis.
    pub fn from_matrix(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(QslError::Malformed("projector must be square"));
        }
        if matrix.hermitian_defect() > PROJECTOR_TOL {
            return Err(QslError::Malformed("projector is not Hermitian"));
        }
        let matrix = matrix.hermitian_part();
        if (&matrix.matmul(&matrix) - &matrix).max_abs() > PROJECTOR_TOL {
            return Err(QslError::Malformed("projector is not idempotent"));
        }
        let basis = range_basis(&matrix, true)?;
        let out = Self { matrix, basis };
        out.validate()?;
        Ok(out)
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::zeros(dim, dim),
            basis: ComplexMatrix::zeros(dim, 0),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim),
            basis: ComplexMatrix::identity(dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn rank(&self) -> usize {
        self.basis.cols()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Orthonormal basis of the range, one vector per column.
    pub fn basis(&self) -> &ComplexMatrix {
        &self.basis
    }

    /// Checks `P = P* = P²` to `PROJECTOR_TOL` and `trace P ≈ rank`.
    pub fn validate(&self) -> Result<()> {
        let p = &self.matrix;
        if p.hermitian_defect() > PROJECTOR_TOL {
            return Err(QslError::Malformed("projector is not Hermitian"));
        }
        if (&p.matmul(p) - p).max_abs() > PROJECTOR_TOL {
            return Err(QslError::Malformed("projector is not idempotent"));
        }
        let tr = p.trace();
        if (tr.re - self.rank() as f64).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(QslError::Malformed("projector trace does not match its rank"));
        }
        Ok(())
    }

    /// `I − P`.
    pub fn complement(&self) -> Self {
        let n = self.dim();
        let mut matrix = self.matrix.scale_real(-1.0);
        for i in 0..n {
            matrix[(i, i)] += ONE;
        }
        let basis = if self.rank() == 0 {
            ComplexMatrix::identity(n)
        } else if self.rank() == n {
            ComplexMatrix::zeros(n, 0)
        } else {
            range_basis(&self.matrix, false).expect("projector spectrum is well conditioned")
        };
        Self { matrix, basis }
    }

    /// `U P U*` with `U` unitary; the range basis is carried along as `U W`.
    pub fn conjugated_by(&self, u: &ComplexMatrix) -> Self {
        let basis = u.matmul(&self.basis);
        Self::from_orthonormal_columns(basis)
    }
}

/// Eigenvectors of a projector with eigenvalue near 1 (`upper`) or near 0.
fn range_basis(p: &ComplexMatrix, upper: bool) -> Result<ComplexMatrix> {
    let eig = hermitian_eigen(p)?;
    let cols: Vec<usize> = eig
        .eigenvalues()
        .iter()
        .enumerate()
        .filter(|(_, &l)| (l > 0.5) == upper)
        .map(|(j, _)| j)
        .collect();
    Ok(eig.eigenvectors().columns(&cols))
}

/// Orthogonal projector onto the span of `basis`.
///
/// Classical Gram–Schmidt with two orthogonalization passes; a candidate
/// whose residual falls below `RANK_TOL × (‖v‖ + 1)` is treated as
/// dependent and dropped.
pub fn project_onto_span(basis: &SubspaceBasis) -> Result<OrthogonalProjector> {
    let dim = basis.dim();
    let mut accepted: Vec<Vec<Complex64>> = Vec::new();
    for v in basis.vectors() {
        let original = norm(v);
        if original <= RANK_TOL {
            continue;
        }
        let mut r = v.clone();
        for _ in 0..2 {
            let coeffs: Vec<Complex64> = accepted.iter().map(|q| inner(q, &r)).collect();
            for (q, c) in accepted.iter().zip(coeffs) {
                axpy_sub(&mut r, c, q);
            }
        }
        let residual = norm(&r);
        if residual < RANK_TOL * (original + 1.0) {
            continue;
        }
        for z in r.iter_mut() {
            *z /= residual;
        }
        accepted.push(r);
    }
    if accepted.is_empty() {
        return Err(QslError::EmptySpan);
    }
    Ok(OrthogonalProjector::from_orthonormal_columns(ComplexMatrix::from_columns(
        dim, &accepted,
    )))
}

/// `I − P`.
pub fn complement(p: &OrthogonalProjector) -> OrthogonalProjector {
    p.complement()
}

fn check_dims(q: &OrthogonalProjector, r: &OrthogonalProjector) -> Result<()> {
    if q.dim() != r.dim() {
        return Err(QslError::DimensionMismatch { left: q.dim(), right: r.dim() });
    }
    Ok(())
}

fn clamp_unit(x: f64) -> f64 {
    if x > 1.0 + CLAMP_WARN {
        log::warn!("gap {x} exceeds 1 by more than {CLAMP_WARN:e}; clamping");
    }
    x.clamp(0.0, 1.0)
}

/// Puts a pair in a fixed order so that symmetric quantities are bitwise
/// symmetric under roundoff.
fn canonical_pair<'a>(
    q: &'a OrthogonalProjector,
    r: &'a OrthogonalProjector,
) -> (&'a OrthogonalProjector, &'a OrthogonalProjector) {
    let key = |z: &Complex64| (z.re.to_bits(), z.im.to_bits());
    let qs = q.matrix().as_slice().iter().map(key);
    let rs = r.matrix().as_slice().iter().map(key);
    if qs.le(rs) {
        (q, r)
    } else {
        (r, q)
    }
}

/// Gap metric `‖Q − R‖`, computed as the spectral radius of the Hermitian
/// difference and clamped to `[0, 1]`.
pub fn gap_distance(q: &OrthogonalProjector, r: &OrthogonalProjector) -> Result<f64> {
    check_dims(q, r)?;
    let (q, r) = canonical_pair(q, r);
    let diff = q.matrix() - r.matrix();
    Ok(clamp_unit(hermitian_eigen(&diff)?.spectral_radius()))
}

/// Smallest of the `k_right` singular values of `W_left* W_right`: the
/// cosine of the largest angle from `ran right` into `ran left`.
fn min_overlap_cosine(left: &OrthogonalProjector, right: &OrthogonalProjector) -> Result<f64> {
    if left.rank() < right.rank() {
        return Ok(0.0);
    }
    let overlap = left.basis().adjoint_mul(right.basis());
    let sv = singular_values(&overlap)?;
    Ok(sv.last().copied().unwrap_or(1.0).min(1.0))
}

/// Maximal angle `ϑ(Q, R) = arcsin ‖Q − R‖ ∈ [0, π/2]`.
pub fn maximal_angle(q: &OrthogonalProjector, r: &OrthogonalProjector) -> Result<f64> {
    let sin = gap_distance(q, r)?;
    let (q, r) = canonical_pair(q, r);
    if q.rank() != r.rank() {
        // ‖Q − R‖ = 1 for projectors of different rank.
        return Ok(FRAC_PI_2);
    }
    if q.rank() == 0 {
        return Ok(0.0);
    }
    let cos = min_overlap_cosine(q, r)?;
    Ok(sin.atan2(cos))
}

/// Relative angle `φ(Q, R) = arcsin ‖Q^⊥ R‖`; not symmetric in general.
pub fn relative_angle(q: &OrthogonalProjector, r: &OrthogonalProjector) -> Result<f64> {
    check_dims(q, r)?;
    if q.rank() == 0 {
        return Err(QslError::EmptySubspace);
    }
    if r.rank() == 0 {
        return Ok(0.0);
    }
    let residual = q.complement().matrix().matmul(r.basis());
    let sin = clamp_unit(singular_values(&residual)?.first().copied().unwrap_or(0.0));
    let cos = min_overlap_cosine(q, r)?;
    Ok(sin.atan2(cos))
}
