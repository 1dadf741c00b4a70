use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{QslError, Result};
use crate::evolution::{check_unit, commutator};
use crate::linalg::{hermitian_eigen, inner, HermitianOperator, I};
use crate::subspace::OrthogonalProjector;

/// `V_{H,P₀} = ‖[H, P₀]‖`.
///
/// `i[H, P₀]` is Hermitian, so the norm is its spectral radius.
pub fn commutator_speed(h: &HermitianOperator, p0: &OrthogonalProjector) -> Result<f64> {
    let k = commutator(h, p0)?.scale(I);
    Ok(hermitian_eigen(&k)?.spectral_radius())
}

/// Energy variance `‖Hf‖² − ⟨Hf, f⟩²` of a unit vector, clamped at zero.
pub fn energy_variance(h: &HermitianOperator, f: &[Complex64]) -> Result<f64> {
    if f.len() != h.dim() {
        return Err(QslError::DimensionMismatch { left: h.dim(), right: f.len() });
    }
    check_unit(f)?;
    Ok(variance_unchecked(h, f))
}

pub(crate) fn variance_unchecked(h: &HermitianOperator, f: &[Complex64]) -> f64 {
    let hf = h.matrix().mul_vec(f);
    let second: f64 = hf.iter().map(|z| z.norm_sqr()).sum();
    let mean = inner(f, &hf).re;
    (second - mean * mean).max(0.0)
}

/// Extreme eigenvalues `m = E_min(H)`, `M = E_max(H)` and the width `M − m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralWidth {
    pub e_min: f64,
    pub e_max: f64,
    pub width: f64,
}

pub fn spectral_width(h: &HermitianOperator) -> SpectralWidth {
    let eig = h.eigen();
    SpectralWidth {
        e_min: eig.min(),
        e_max: eig.max(),
        width: eig.max() - eig.min(),
    }
}

/// `δE = ⟨Hψ₀, ψ₀⟩ − E_min(H)`, the mean energy above the ground level.
pub fn margolus_levitin_delta(h: &HermitianOperator, psi0: &[Complex64]) -> Result<f64> {
    if psi0.len() != h.dim() {
        return Err(QslError::DimensionMismatch { left: h.dim(), right: psi0.len() });
    }
    check_unit(psi0)?;
    let mean = inner(psi0, &h.matrix().mul_vec(psi0)).re;
    Ok(mean - h.eigen().min())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{ONE, ZERO};
    use crate::scenarios::two_level;

    #[test]
    fn eigenvector_has_zero_variance() {
        let h = HermitianOperator::from_real_diagonal(&[0.5, 2.0]).unwrap();
        assert_eq!(energy_variance(&h, &[ZERO, ONE]).unwrap(), 0.0);
    }

    #[test]
    fn two_level_values() {
        let sc = two_level(0.0, 1.0).unwrap();
        let s = 1.0 / 2f64.sqrt();
        let e = [Complex64::new(s, 0.0); 2];
        assert!((energy_variance(sc.hamiltonian(), &e).unwrap() - 0.25).abs() < 1e-15);
        assert!((commutator_speed(sc.hamiltonian(), sc.initial()).unwrap() - 0.5).abs() < 1e-15);
        assert!((margolus_levitin_delta(sc.hamiltonian(), &e).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn ground_state_has_zero_ml_delta() {
        let h = HermitianOperator::from_real_diagonal(&[-1.0, 3.0]).unwrap();
        assert_eq!(margolus_levitin_delta(&h, &[ONE, ZERO]).unwrap(), 0.0);
        let shifted = h.shifted(-7.5).unwrap();
        assert_eq!(margolus_levitin_delta(&shifted, &[ONE, ZERO]).unwrap(), 0.0);
    }

    #[test]
    fn width_of_diagonal() {
        let h = HermitianOperator::from_real_diagonal(&[0.0, 1.0]).unwrap();
        assert_eq!(spectral_width(&h), SpectralWidth { e_min: 0.0, e_max: 1.0, width: 1.0 });
        let w = spectral_width(&h.shifted(3.0).unwrap());
        assert!((w.width - 1.0).abs() < 1e-15);
    }

    #[test]
    fn non_unit_rejected() {
        let h = HermitianOperator::from_real_diagonal(&[0.0, 1.0]).unwrap();
        assert!(matches!(energy_variance(&h, &[ONE, ONE]), Err(QslError::NonUnitInput { .. })));
        assert!(matches!(margolus_levitin_delta(&h, &[ZERO, ZERO]), Err(QslError::NonUnitInput { .. })));
    }
}
