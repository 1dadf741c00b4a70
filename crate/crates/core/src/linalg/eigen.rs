//! Cyclic complex Jacobi eigensolver and the spectral calculus built on it.

use alloc::vec::Vec;
use core::ops::Range;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use super::matrix::{inner, ComplexMatrix, ZERO};
use crate::error::{QslError, Result};

/// Sweep cap for the Jacobi iteration.
pub const MAX_SWEEPS: usize = 100;
/// Convergence when the off-diagonal Frobenius norm drops below this times ‖A‖_F.
pub const OFF_DIAGONAL_TOL: f64 = 1e-13;
/// Relative Hermiticity tolerance accepted at construction.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Eigenvalues closer than this form one numerically degenerate cluster.
pub const CLUSTER_GAP: f64 = 1e-10;

/// Eigenvalues in ascending order with orthonormal eigenvector columns.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: ComplexMatrix,
}

impl EigenDecomposition {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Column `j` is the eigenvector of `eigenvalues()[j]`.
    pub fn eigenvectors(&self) -> &ComplexMatrix {
        &self.eigenvectors
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues[self.eigenvalues.len() - 1]
    }

    /// max |λ|.
    pub fn spectral_radius(&self) -> f64 {
        self.min().abs().max(self.max().abs())
    }

    /// V diag(λ) V*.
    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map(|l| Complex64::new(l, 0.0))
    }

    /// V diag(f(λ)) V*.
    pub fn map(&self, f: impl Fn(f64) -> Complex64) -> ComplexMatrix {
        let n = self.dim();
        let v = &self.eigenvectors;
        let weights: Vec<Complex64> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        let scaled = ComplexMatrix::from_fn(n, n, |i, j| v[(i, j)] * weights[j]);
        scaled.matmul(&v.adjoint())
    }

    /// Index ranges of numerically degenerate eigenvalue clusters.
    pub fn clusters(&self) -> Vec<Range<usize>> {
        let mut out = Vec::new();
        let mut start = 0;
        for j in 1..=self.dim() {
            if j == self.dim() || self.eigenvalues[j] - self.eigenvalues[j - 1] >= CLUSTER_GAP {
                out.push(start..j);
                start = j;
            }
        }
        out
    }
}

/// Diagonalizes a Hermitian matrix by cyclic Jacobi rotations. The input is
/// checked against `HERMITIAN_TOL` and symmetrized first.
pub fn hermitian_eigen(matrix: &ComplexMatrix) -> Result<EigenDecomposition> {
    check_hermitian(matrix)?;
    jacobi(&matrix.hermitian_part())
}

fn check_hermitian(matrix: &ComplexMatrix) -> Result<()> {
    if !matrix.is_square() || matrix.rows() == 0 {
        return Err(QslError::Malformed("Hermitian operator must be a nonempty square matrix"));
    }
    if !matrix.is_finite() {
        return Err(QslError::Malformed("non-finite matrix entry"));
    }
    let defect = matrix.hermitian_defect();
    if defect > HERMITIAN_TOL * (1.0 + matrix.max_abs()) {
        return Err(QslError::NotHermitian { defect });
    }
    Ok(())
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut sum = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            sum += a[(i, j)].norm_sqr();
        }
    }
    (2.0 * sum).sqrt()
}

fn jacobi(input: &ComplexMatrix) -> Result<EigenDecomposition> {
    let n = input.rows();
    let mut a = input.clone();
    let mut v = ComplexMatrix::identity(n);
    let tol = OFF_DIAGONAL_TOL * a.frobenius_norm();

    let mut sweep = 0;
    loop {
        let off = off_diagonal_norm(&a);
        if off <= tol {
            break;
        }
        if sweep == MAX_SWEEPS {
            return Err(QslError::NoConvergence { sweeps: sweep, off_norm: off });
        }
        sweep += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re).then(i.cmp(&j)));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut eigenvectors = v.columns(&order);

    let mut decomposition = EigenDecomposition {
        eigenvalues,
        eigenvectors: ComplexMatrix::zeros(0, 0),
    };
    for cluster in decomposition.clusters() {
        if cluster.len() > 1 {
            reorthonormalize(&mut eigenvectors, cluster);
        }
    }
    for j in 0..n {
        fix_phase(&mut eigenvectors, j);
    }
    decomposition.eigenvectors = eigenvectors;
    Ok(decomposition)
}

/// One complex Jacobi rotation annihilating `a[p][q]`.
///
/// With `a_pq = r e^{iφ}` the rotation is `G = diag(1, e^{-iφ}) · R(c, s)`,
/// which first makes the pivot block real symmetric and then applies the
/// classical real rotation.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let n = a.rows();
    let phase = apq / r;
    let theta = (a[(q, q)].re - a[(p, p)].re) / (2.0 * r);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        let t = 1.0 / (theta.abs() + (theta * theta + 1.0).sqrt());
        if theta < 0.0 {
            -t
        } else {
            t
        }
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    let g_pp = Complex64::new(c, 0.0);
    let g_pq = Complex64::new(s, 0.0);
    let g_qp = phase.conj() * (-s);
    let g_qq = phase.conj() * c;

    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * g_pp + akq * g_qp;
        a[(k, q)] = akp * g_pq + akq * g_qq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
        a[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)].im = 0.0;
    a[(q, q)].im = 0.0;

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * g_pp + vkq * g_qp;
        v[(k, q)] = vkp * g_pq + vkq * g_qq;
    }
}

/// Two passes of modified Gram–Schmidt over the columns in `cluster`.
fn reorthonormalize(v: &mut ComplexMatrix, cluster: Range<usize>) {
    for _ in 0..2 {
        for j in cluster.clone() {
            let mut col = v.column(j);
            for k in cluster.start..j {
                let basis = v.column(k);
                let c = inner(&basis, &col);
                super::matrix::axpy_sub(&mut col, c, &basis);
            }
            let nrm = super::matrix::norm(&col);
            for z in col.iter_mut() {
                *z /= nrm;
            }
            v.set_column(j, &col);
        }
    }
}

/// Rotates column `j` so that its largest-modulus entry (lowest index on
/// ties) is real and positive.
fn fix_phase(v: &mut ComplexMatrix, j: usize) {
    let n = v.rows();
    let largest = (0..n).map(|i| v[(i, j)].norm()).fold(0.0, f64::max);
    if largest == 0.0 {
        return;
    }
    let pivot = (0..n)
        .find(|&i| v[(i, j)].norm() >= largest * (1.0 - 1e-12))
        .unwrap_or(0);
    let z = v[(pivot, j)];
    let rot = z.conj() / z.norm();
    for i in 0..n {
        v[(i, j)] *= rot;
    }
    v[(pivot, j)] = Complex64::new(v[(pivot, j)].re, 0.0);
}

/// A validated Hermitian matrix together with its eigendecomposition.
///
/// The stored matrix is exactly Hermitian, `(A + A*)/2` of the input.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    matrix: ComplexMatrix,
    eigen: EigenDecomposition,
}

impl HermitianOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        check_hermitian(&matrix)?;
        let matrix = matrix.hermitian_part();
        let eigen = jacobi(&matrix)?;
        Ok(Self { matrix, eigen })
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Result<Self> {
        Self::new(ComplexMatrix::from_real_diagonal(diag))
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn eigen(&self) -> &EigenDecomposition {
        &self.eigen
    }

    /// Operator norm, max |λ|.
    pub fn norm(&self) -> f64 {
        self.eigen.spectral_radius()
    }

    /// `H − cI`.
    pub fn shifted(&self, c: f64) -> Result<Self> {
        let mut m = self.matrix.clone();
        for i in 0..self.dim() {
            m[(i, i)] -= c;
        }
        Self::new(m)
    }
}

/// `f(A) = V diag(f(λ)) V*`.
pub fn apply_function(a: &HermitianOperator, f: impl Fn(f64) -> Complex64) -> ComplexMatrix {
    a.eigen.map(f)
}

/// Singular values in descending order, read off the Hermitian dilation.
///
/// Accurate to roughly machine precision times σ_max in absolute terms,
/// including the small ones (no squaring as in `A*A`).
pub fn singular_values(a: &ComplexMatrix) -> Result<Vec<f64>> {
    if !a.is_finite() {
        return Err(QslError::Malformed("non-finite matrix entry"));
    }
    let k = a.rows().min(a.cols());
    if k == 0 {
        return Ok(Vec::new());
    }
    let eig = jacobi(&a.hermitian_dilation())?;
    let values = eig.eigenvalues();
    Ok(values.iter().rev().take(k).map(|&s| s.max(0.0)).collect())
}

/// Largest singular value. Hermitian inputs use max |λ| directly.
pub fn operator_norm(a: &ComplexMatrix) -> Result<f64> {
    if a.rows() == 0 || a.cols() == 0 {
        return Ok(0.0);
    }
    if a.is_square() && a.is_finite() && a.hermitian_defect() == 0.0 {
        return Ok(jacobi(a)?.spectral_radius());
    }
    Ok(singular_values(a)?.first().copied().unwrap_or(0.0))
}
