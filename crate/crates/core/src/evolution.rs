//! Schrödinger evolution of states and of the projector path
//! `P(t) = e^{-iHt} P₀ e^{iHt}`.
//!
//! The propagator is evaluated in closed form from the eigendecomposition of
//! `H`, so `U(t)` is unitary up to roundoff for every `t`. In finite
//! dimension every vector lies in the domain of `H` and `P₀` leaves that
//! domain invariant, so no domain bookkeeping is needed.

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{QslError, Result};
use crate::linalg::{norm, operator_norm, ComplexMatrix, HermitianOperator, I};
use crate::subspace::OrthogonalProjector;

/// Accepted deviation of a state's norm from 1.
pub const UNIT_TOL: f64 = 1e-10;

pub(crate) fn check_unit(psi: &[Complex64]) -> Result<()> {
    let n = norm(psi);
    if (n - 1.0).abs() > UNIT_TOL || !n.is_finite() {
        return Err(QslError::NonUnitInput { norm: n });
    }
    Ok(())
}

/// `t ↦ U(t) = e^{-iHt}`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryPropagator {
    hamiltonian: HermitianOperator,
}

impl UnitaryPropagator {
    pub fn new(hamiltonian: HermitianOperator) -> Self {
        Self { hamiltonian }
    }

    pub fn hamiltonian(&self) -> &HermitianOperator {
        &self.hamiltonian
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }

    /// `U(t)`; exactly the identity at `t = 0`.
    pub fn at(&self, t: f64) -> ComplexMatrix {
        if t == 0.0 {
            return ComplexMatrix::identity(self.dim());
        }
        self.hamiltonian
            .eigen()
            .map(|l| Complex64::from_polar(1.0, -l * t))
    }
}

/// `ψ(t) = U(t) ψ₀`.
pub fn evolve_state(prop: &UnitaryPropagator, psi0: &[Complex64], t: f64) -> Result<Vec<Complex64>> {
    if psi0.len() != prop.dim() {
        return Err(QslError::DimensionMismatch { left: prop.dim(), right: psi0.len() });
    }
    check_unit(psi0)?;
    if t == 0.0 {
        return Ok(psi0.to_vec());
    }
    // Expand in the eigenbasis, rotate phases, transform back.
    let eig = prop.hamiltonian().eigen();
    let v = eig.eigenvectors();
    let coeffs = v.adjoint().mul_vec(psi0);
    let rotated: Vec<Complex64> = coeffs
        .iter()
        .zip(eig.eigenvalues())
        .map(|(&c, &l)| c * Complex64::from_polar(1.0, -l * t))
        .collect();
    Ok(v.mul_vec(&rotated))
}

/// The path `t ↦ P(t)` started from `P₀`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionPath {
    propagator: UnitaryPropagator,
    initial: OrthogonalProjector,
}

impl ProjectionPath {
    pub fn new(hamiltonian: HermitianOperator, initial: OrthogonalProjector) -> Result<Self> {
        if hamiltonian.dim() != initial.dim() {
            return Err(QslError::DimensionMismatch {
                left: hamiltonian.dim(),
                right: initial.dim(),
            });
        }
        Ok(Self {
            propagator: UnitaryPropagator::new(hamiltonian),
            initial,
        })
    }

    pub fn propagator(&self) -> &UnitaryPropagator {
        &self.propagator
    }

    pub fn hamiltonian(&self) -> &HermitianOperator {
        self.propagator.hamiltonian()
    }

    pub fn initial(&self) -> &OrthogonalProjector {
        &self.initial
    }

    pub fn dim(&self) -> usize {
        self.initial.dim()
    }

    /// `P(t) = U(t) P₀ U(t)*`.
    pub fn at(&self, t: f64) -> OrthogonalProjector {
        project_at(self, t)
    }
}

/// `P(t) = U(t) P₀ U(t)*`; returns `P₀` itself at `t = 0`.
pub fn project_at(path: &ProjectionPath, t: f64) -> OrthogonalProjector {
    if t == 0.0 {
        return path.initial.clone();
    }
    path.initial.conjugated_by(&path.propagator.at(t))
}

/// `[H, P] = HP − PH`.
pub fn commutator(h: &HermitianOperator, p: &OrthogonalProjector) -> Result<ComplexMatrix> {
    if h.dim() != p.dim() {
        return Err(QslError::DimensionMismatch { left: h.dim(), right: p.dim() });
    }
    let hp = h.matrix().matmul(p.matrix());
    let ph = p.matrix().matmul(h.matrix());
    Ok(&hp - &ph)
}

/// `H` written as a 2×2 block operator with respect to `ran P ⊕ ran P^⊥`,
/// in orthonormal coordinates of each summand.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockDecomposition {
    /// Compression of `H` to `ran P`.
    pub h_pp: ComplexMatrix,
    /// Compression of `H` to `ran P^⊥`.
    pub h_qq: ComplexMatrix,
    /// Upper off-diagonal block `P H|_{ran P^⊥}`.
    pub b: ComplexMatrix,
    /// Lower off-diagonal block `P^⊥ H|_{ran P}`; equals `b*`.
    pub c: ComplexMatrix,
    pub basis_p: ComplexMatrix,
    pub basis_q: ComplexMatrix,
}

impl BlockDecomposition {
    /// Reassembles `H` in the original coordinates.
    pub fn reassemble(&self) -> ComplexMatrix {
        let (wp, wq) = (&self.basis_p, &self.basis_q);
        let pp = wp.matmul(&self.h_pp).matmul(&wp.adjoint());
        let pq = wp.matmul(&self.b).matmul(&wq.adjoint());
        let qp = wq.matmul(&self.c).matmul(&wp.adjoint());
        let qq = wq.matmul(&self.h_qq).matmul(&wq.adjoint());
        &(&pp + &pq) + &(&qp + &qq)
    }
}

pub fn block_decompose(h: &HermitianOperator, p: &OrthogonalProjector) -> Result<BlockDecomposition> {
    if h.dim() != p.dim() {
        return Err(QslError::DimensionMismatch { left: h.dim(), right: p.dim() });
    }
    if p.rank() == 0 || p.rank() == p.dim() {
        return Err(QslError::TrivialSubspace { rank: p.rank(), dim: p.dim() });
    }
    let wp = p.basis().clone();
    let wq = p.complement().basis().clone();
    let hm = h.matrix();
    let h_wp = hm.matmul(&wp);
    let h_wq = hm.matmul(&wq);
    Ok(BlockDecomposition {
        h_pp: wp.adjoint_mul(&h_wp).hermitian_part(),
        h_qq: wq.adjoint_mul(&h_wq).hermitian_part(),
        b: wp.adjoint_mul(&h_wq),
        c: wq.adjoint_mul(&h_wp),
        basis_p: wp,
        basis_q: wq,
    })
}

/// Default central-difference step, `10⁻⁴ / (1 + ‖H‖)`.
pub fn default_derivative_step(h: &HermitianOperator) -> f64 {
    1e-4 / (1.0 + h.norm())
}

/// `‖(P(t+h) − P(t−h)) / 2h + i[H, P(t)]‖`, the residual of the projector
/// equation `Ṗ = −i[H, P]` under a central difference.
pub fn derivative_check(path: &ProjectionPath, t: f64, h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(QslError::InvalidArgument("difference step must be positive"));
    }
    let forward = project_at(path, t + h);
    let backward = project_at(path, t - h);
    let slope = (forward.matrix() - backward.matrix()).scale_real(0.5 / h);
    let generator = commutator(path.hamiltonian(), &project_at(path, t))?.scale(I);
    operator_norm(&(&slope + &generator))
}
