//! Problem instances: the two-level system with its closed-form path,
//! projectors onto eigenvectors of `H`, and seeded random ensembles.
//!
//! Randomness comes from ChaCha8 seeded with `seed_from_u64(seed)`;
//! instance `i` of an ensemble reads stream `i` of that generator, so any
//! instance can be regenerated without drawing its predecessors. A standard
//! complex Gaussian is `(x + iy)/√2` with `x`, `y` independent unit normals.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{QslError, Result};
use crate::evolution::ProjectionPath;
use crate::linalg::{ComplexMatrix, HermitianOperator};
use crate::subspace::{project_onto_span, OrthogonalProjector, SubspaceBasis};

pub fn standard_complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let x: f64 = rng.sample(StandardNormal);
    let y: f64 = rng.sample(StandardNormal);
    Complex64::new(x, y) * core::f64::consts::FRAC_1_SQRT_2
}

/// `H = diag(E₁, E₂)` with `P₀` onto `(e₁ + e₂)/√2`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoLevelScenario {
    e1: f64,
    e2: f64,
    path: ProjectionPath,
}

pub fn two_level(e1: f64, e2: f64) -> Result<TwoLevelScenario> {
    if !e1.is_finite() || !e2.is_finite() {
        return Err(QslError::InvalidArgument("energies must be finite"));
    }
    if e1 == e2 {
        return Err(QslError::DegenerateLevels);
    }
    let h = HermitianOperator::from_real_diagonal(&[e1, e2])?;
    let s = Complex64::new(core::f64::consts::FRAC_1_SQRT_2, 0.0);
    let p0 = project_onto_span(&SubspaceBasis::new(2, vec![vec![s, s]])?)?;
    Ok(TwoLevelScenario { e1, e2, path: ProjectionPath::new(h, p0)? })
}

impl TwoLevelScenario {
    pub fn e1_energy(&self) -> f64 {
        self.e1
    }

    pub fn e2_energy(&self) -> f64 {
        self.e2
    }

    pub fn hamiltonian(&self) -> &HermitianOperator {
        self.path.hamiltonian()
    }

    pub fn initial(&self) -> &OrthogonalProjector {
        self.path.initial()
    }

    pub fn path(&self) -> &ProjectionPath {
        &self.path
    }

    /// `|E₂ − E₁| / 2`, the commutator speed.
    pub fn speed(&self) -> f64 {
        0.5 * (self.e2 - self.e1).abs()
    }

    /// Closed-form `P(τ) = ½ [[1, e^{iΔτ}], [e^{−iΔτ}, 1]]`, `Δ = E₂ − E₁`.
    pub fn analytic_projector(&self, tau: f64) -> ComplexMatrix {
        let phase = Complex64::from_polar(0.5, (self.e2 - self.e1) * tau);
        let half = Complex64::new(0.5, 0.0);
        ComplexMatrix::from_row_major(2, 2, vec![half, phase, phase.conj(), half])
            .expect("finite 2x2 data")
    }

    /// Eigenvalues `∓ sin(ω|t − s|)` of `P(t) − P(s)`, ascending, `ω = |Δ|/2`.
    pub fn analytic_difference_eigenvalues(&self, s: f64, t: f64) -> [f64; 2] {
        let x = (self.speed() * (t - s).abs()).sin().abs();
        [-x, x]
    }

    /// `ϑ(ran P(s), ran P(t)) = arcsin |sin(ω|t − s|)|`, a tent of slope `ω`.
    pub fn analytic_angle(&self, s: f64, t: f64) -> f64 {
        let x = (self.speed() * (t - s).abs()) % PI;
        x.min(PI - x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnsembleKind {
    /// `H = (A + A*)/2` with standard complex Gaussian entries in `A`.
    Gue,
    /// Sorted uniform `[0, 1)` diagonal plus `0.1 ×` Gaussian couplings.
    DiagonalPlusCoupling,
}

impl EnsembleKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EnsembleKind::Gue => "gue",
            EnsembleKind::DiagonalPlusCoupling => "diagonal_plus_coupling",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnsembleSpec {
    pub dim: usize,
    pub rank: usize,
    pub kind: EnsembleKind,
    pub seed: u64,
    pub count: usize,
}

impl EnsembleSpec {
    pub fn validate(&self) -> Result<()> {
        if self.dim < 2 {
            return Err(QslError::InvalidArgument("ensemble dimension must be at least 2"));
        }
        if self.rank == 0 || self.rank >= self.dim {
            return Err(QslError::InvalidArgument("ensemble rank must lie in [1, dim - 1]"));
        }
        Ok(())
    }
}

/// The `index`-th instance of `spec`, independent of `spec.count`.
pub fn sample_instance(spec: &EnsembleSpec, index: usize) -> Result<(HermitianOperator, OrthogonalProjector)> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(index as u64);
    let n = spec.dim;
    let h = match spec.kind {
        EnsembleKind::Gue => {
            let a = ComplexMatrix::from_fn(n, n, |_, _| standard_complex_gaussian(&mut rng));
            (&a + &a.adjoint()).scale_real(0.5)
        }
        EnsembleKind::DiagonalPlusCoupling => {
            let mut diag: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
            diag.sort_by(f64::total_cmp);
            let mut m = ComplexMatrix::from_real_diagonal(&diag);
            for i in 0..n {
                for j in i + 1..n {
                    let z = standard_complex_gaussian(&mut rng) * 0.1;
                    m[(i, j)] = z;
                    m[(j, i)] = z.conj();
                }
            }
            m
        }
    };
    let h = HermitianOperator::new(h)?;

    // Gaussian vectors are linearly dependent with probability zero; keep
    // drawing if roundoff ever drops one.
    let mut vectors: Vec<Vec<Complex64>> = Vec::with_capacity(spec.rank);
    for _ in 0..spec.rank + 16 {
        vectors.push((0..n).map(|_| standard_complex_gaussian(&mut rng)).collect());
        if vectors.len() < spec.rank {
            continue;
        }
        let p = project_onto_span(&SubspaceBasis::new(n, vectors.clone())?)?;
        if p.rank() == spec.rank {
            return Ok((h, p));
        }
    }
    Err(QslError::InvalidArgument("could not draw a subspace of the requested rank"))
}

pub fn sample_ensemble(spec: &EnsembleSpec) -> Result<Vec<(HermitianOperator, OrthogonalProjector)>> {
    (0..spec.count).map(|i| sample_instance(spec, i)).collect()
}

/// Projector onto the span of the eigenvectors of `H` with the given
/// (ascending-order) indices.
pub fn spectral_projector_case(h: &HermitianOperator, eigen_indices: &[usize]) -> Result<OrthogonalProjector> {
    let n = h.dim();
    let mut idx = eigen_indices.to_vec();
    idx.sort_unstable();
    idx.dedup();
    if let Some(&bad) = idx.iter().find(|&&i| i >= n) {
        return Err(QslError::IndexOutOfRange { index: bad, len: n });
    }
    if idx.is_empty() {
        return Ok(OrthogonalProjector::zero(n));
    }
    Ok(OrthogonalProjector::from_orthonormal_columns(h.eigen().eigenvectors().columns(&idx)))
}
