#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use subqsl_core::linalg::{norm, ComplexMatrix, HermitianOperator};
use subqsl_core::scenarios::standard_complex_gaussian;
use subqsl_core::subspace::{project_onto_span, OrthogonalProjector, SubspaceBasis};
use subqsl_core::Complex64;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| standard_complex_gaussian(rng))
}

pub fn random_hermitian(rng: &mut ChaCha8Rng, dim: usize) -> HermitianOperator {
    let a = gaussian_matrix(rng, dim, dim);
    HermitianOperator::new((&a + &a.adjoint()).scale_real(0.5)).unwrap()
}

pub fn random_unit(rng: &mut ChaCha8Rng, dim: usize) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..dim).map(|_| standard_complex_gaussian(rng)).collect();
    let n = norm(&v);
    v.into_iter().map(|z| z / n).collect()
}

/// Projector onto the span of `rank` Gaussian vectors; rank 0 and full rank allowed.
pub fn random_projector(rng: &mut ChaCha8Rng, dim: usize, rank: usize) -> OrthogonalProjector {
    if rank == 0 {
        return OrthogonalProjector::zero(dim);
    }
    let vectors = (0..rank).map(|_| random_unit(rng, dim)).collect();
    let p = project_onto_span(&SubspaceBasis::new(dim, vectors).unwrap()).unwrap();
    assert_eq!(p.rank(), rank);
    p
}

/// A random instance with `2 ≤ dim ≤ max_dim` and `1 ≤ rank ≤ dim − 1`.
pub fn random_instance(rng: &mut ChaCha8Rng, max_dim: usize) -> (HermitianOperator, OrthogonalProjector) {
    let dim = rng.random_range(2..=max_dim);
    let rank = rng.random_range(1..dim);
    let h = random_hermitian(rng, dim);
    let p = random_projector(rng, dim, rank);
    (h, p)
}

pub fn max_abs_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    (a - b).max_abs()
}
