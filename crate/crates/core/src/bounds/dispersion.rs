//! Maximal energy dispersion over the unit sphere of a subspace.
//!
//! With an orthonormal basis `W` of `ran P₀` the problem is
//!
//! ```text
//! ΔE² = max_{x ∈ Cᵏ, ‖x‖ = 1}  ⟨x, A x⟩ − ⟨x, G x⟩²,   A = (H̃W)*(H̃W),  G = W* H̃ W,
//! ```
//!
//! where `H̃ = H − ((m + M)/2) I` is a shifted copy of `H`. The shift leaves
//! every variance unchanged and keeps the two terms small, which limits
//! cancellation. The objective is smooth but not concave, so the ascent is
//! restarted from seeded random points. Rank-one subspaces are handled in
//! closed form, and for rank two an exhaustive grid search is available as
//! an independent check.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::speed::{spectral_width, variance_unchecked};
use crate::error::{QslError, Result};
use crate::linalg::{inner, norm, operator_norm, ComplexMatrix, HermitianOperator};
use crate::scenarios::standard_complex_gaussian;
use crate::subspace::OrthogonalProjector;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DispersionMethod {
    /// Rank-one subspace: the unit sphere is a single state up to phase.
    SingleState,
    GradientAscent,
    GridOracle,
}

impl DispersionMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            DispersionMethod::SingleState => "single_state",
            DispersionMethod::GradientAscent => "gradient_ascent",
            DispersionMethod::GridOracle => "grid_oracle",
        }
    }
}

/// `ΔE_{P₀}` together with the unit vector of `ran P₀` attaining it.
#[derive(Debug, Clone, PartialEq)]
pub struct DispersionResult {
    pub value: f64,
    pub maximizer: Vec<Complex64>,
    pub method: DispersionMethod,
}

/// Riemannian gradient ascent parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerSettings {
    pub restarts: usize,
    pub max_iterations: usize,
    /// Stop once the tangential gradient norm is below `gradient_tol · (1 + ‖A‖)`.
    pub gradient_tol: f64,
    pub armijo: f64,
    pub shrink: f64,
    /// Master seed; restart `r` draws its start point from ChaCha8 stream `r`.
    pub seed: u64,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        Self {
            restarts: 32,
            max_iterations: 10_000,
            gradient_tol: 1e-10,
            armijo: 1e-4,
            shrink: 0.5,
            seed: 0x005e_ed0f_f5e7,
        }
    }
}

struct Compressed {
    a: ComplexMatrix,
    g: ComplexMatrix,
    a_norm: f64,
}

impl Compressed {
    fn new(h: &HermitianOperator, basis: &ComplexMatrix) -> Result<Self> {
        let width = spectral_width(h);
        let center = 0.5 * (width.e_min + width.e_max);
        let mut shifted = h.matrix().clone();
        for i in 0..h.dim() {
            shifted[(i, i)] -= center;
        }
        let hw = shifted.matmul(basis);
        let a = hw.adjoint_mul(&hw).hermitian_part();
        let g = basis.adjoint_mul(&hw).hermitian_part();
        let a_norm = operator_norm(&a)?;
        Ok(Self { a, g, a_norm })
    }

    fn objective(&self, x: &[Complex64]) -> f64 {
        let xa = inner(x, &self.a.mul_vec(x)).re;
        let xg = inner(x, &self.g.mul_vec(x)).re;
        xa - xg * xg
    }

    /// Tangential gradient at a unit `x`.
    fn riemannian_gradient(&self, x: &[Complex64]) -> Vec<Complex64> {
        let ax = self.a.mul_vec(x);
        let gx = self.g.mul_vec(x);
        let mu = inner(x, &gx).re;
        let euclid: Vec<Complex64> = ax.iter().zip(&gx).map(|(&a, &g)| a * 2.0 - g * (4.0 * mu)).collect();
        let radial = inner(x, &euclid).re;
        euclid.iter().zip(x).map(|(&e, &xi)| e - xi * radial).collect()
    }

    /// One restart of backtracking ascent; returns the final point and value.
    fn ascend(&self, mut x: Vec<Complex64>, settings: &OptimizerSettings) -> (Vec<Complex64>, f64) {
        let step0 = 1.0 / (1.0 + self.a_norm);
        let tol = settings.gradient_tol * (1.0 + self.a_norm);
        let mut value = self.objective(&x);
        for _ in 0..settings.max_iterations {
            let grad = self.riemannian_gradient(&x);
            let gnorm = norm(&grad);
            if gnorm < tol {
                break;
            }
            let mut alpha = step0;
            let mut accepted = false;
            // 80 halvings take the step far below roundoff.
            for _ in 0..80 {
                let trial: Vec<Complex64> = x.iter().zip(&grad).map(|(&xi, &gi)| xi + gi * alpha).collect();
                let trial_norm = norm(&trial);
                let trial: Vec<Complex64> = trial.iter().map(|&z| z / trial_norm).collect();
                let trial_value = self.objective(&trial);
                // Compare the increase itself: `value + tiny` rounds to `value`
                // near the optimum and would accept steps that make no progress.
                if trial_value - value >= settings.armijo * alpha * gnorm * gnorm {
                    x = trial;
                    value = trial_value;
                    accepted = true;
                    break;
                }
                alpha *= settings.shrink;
            }
            if !accepted {
                break;
            }
        }
        (x, value)
    }
}

fn random_unit(k: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..k).map(|_| standard_complex_gaussian(rng)).collect();
    let n = norm(&v);
    v.into_iter().map(|z| z / n).collect()
}

fn finish(h: &HermitianOperator, basis: &ComplexMatrix, x: &[Complex64], method: DispersionMethod) -> DispersionResult {
    let f = basis.mul_vec(x);
    let n = norm(&f);
    let maximizer: Vec<Complex64> = f.into_iter().map(|z| z / n).collect();
    let value = variance_unchecked(h, &maximizer).sqrt();
    DispersionResult { value, maximizer, method }
}

/// `ΔE_{P₀}` with default optimizer settings.
pub fn subspace_dispersion(h: &HermitianOperator, p0: &OrthogonalProjector) -> Result<DispersionResult> {
    subspace_dispersion_with(h, p0, &OptimizerSettings::default())
}

pub fn subspace_dispersion_with(
    h: &HermitianOperator,
    p0: &OrthogonalProjector,
    settings: &OptimizerSettings,
) -> Result<DispersionResult> {
    if h.dim() != p0.dim() {
        return Err(QslError::DimensionMismatch { left: h.dim(), right: p0.dim() });
    }
    let k = p0.rank();
    if k == 0 {
        return Err(QslError::EmptySubspace);
    }
    let basis = p0.basis();
    if k == 1 {
        let x = [Complex64::new(1.0, 0.0)];
        return Ok(finish(h, basis, &x, DispersionMethod::SingleState));
    }

    let problem = Compressed::new(h, basis)?;
    let mut best: Option<(Vec<Complex64>, f64)> = None;
    for restart in 0..settings.restarts.max(1) {
        let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
        rng.set_stream(restart as u64);
        let (x, value) = problem.ascend(random_unit(k, &mut rng), settings);
        // Strict comparison: ties keep the lowest restart index.
        if best.as_ref().is_none_or(|(_, b)| value > *b) {
            best = Some((x, value));
        }
    }
    let (x, _) = best.expect("at least one restart");
    Ok(finish(h, basis, &x, DispersionMethod::GradientAscent))
}

/// Exhaustive search over the rank-two sphere of states.
///
/// States are parametrized as `cos α · w₀ + e^{iβ} sin α · w₁` with
/// `α ∈ [0, π/2]`, `β ∈ [0, 2π)`, evaluated on a `grid × grid` lattice. The
/// best lattice points are then refined by repeatedly re-gridding a
/// shrinking window around them, since the bare lattice error in ΔE is of
/// order `‖H‖² · spacing²`.
pub fn dispersion_grid_oracle(
    h: &HermitianOperator,
    p0: &OrthogonalProjector,
    grid: usize,
) -> Result<DispersionResult> {
    if h.dim() != p0.dim() {
        return Err(QslError::DimensionMismatch { left: h.dim(), right: p0.dim() });
    }
    if p0.rank() != 2 {
        return Err(QslError::InvalidArgument("grid oracle needs a rank-two subspace"));
    }
    if grid < 2 {
        return Err(QslError::InvalidArgument("grid needs at least two points per axis"));
    }
    let w0 = p0.basis().column(0);
    let w1 = p0.basis().column(1);
    let hw0 = h.matrix().mul_vec(&w0);
    let hw1 = h.matrix().mul_vec(&w1);
    let s00 = inner(&hw0, &hw0).re;
    let s11 = inner(&hw1, &hw1).re;
    let s01 = inner(&hw0, &hw1);
    let m00 = inner(&w0, &hw0).re;
    let m11 = inner(&w1, &hw1).re;
    let m01 = inner(&w0, &hw1);
    let variance = |alpha: f64, beta: f64| {
        let (s, c) = alpha.sin_cos();
        let phase = Complex64::from_polar(1.0, beta);
        let second = c * c * s00 + s * s * s11 + 2.0 * c * s * (phase * s01).re;
        let mean = c * c * m00 + s * s * m11 + 2.0 * c * s * (phase * m01).re;
        second - mean * mean
    };

    let d_alpha = FRAC_PI_2 / (grid - 1) as f64;
    let d_beta = 2.0 * PI / grid as f64;
    const KEEP: usize = 16;
    let mut top: Vec<(f64, f64, f64)> = Vec::with_capacity(KEEP + 1);
    for i in 0..grid {
        let alpha = i as f64 * d_alpha;
        for j in 0..grid {
            let beta = j as f64 * d_beta;
            let v = variance(alpha, beta);
            if top.len() < KEEP || v > top[top.len() - 1].0 {
                let pos = top.iter().position(|&(t, _, _)| v > t).unwrap_or(top.len());
                top.insert(pos, (v, alpha, beta));
                top.truncate(KEEP);
            }
        }
    }

    const SUB: usize = 20;
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    for &(v0, a0, b0) in &top {
        let (mut v, mut a, mut b) = (v0, a0, b0);
        let (mut da, mut db) = (d_alpha, d_beta);
        for _ in 0..14 {
            let (ca, cb) = (a, b);
            for i in 0..=SUB {
                let alpha = (ca - da + 2.0 * da * i as f64 / SUB as f64).clamp(0.0, FRAC_PI_2);
                for j in 0..=SUB {
                    let beta = cb - db + 2.0 * db * j as f64 / SUB as f64;
                    let value = variance(alpha, beta);
                    if value > v {
                        v = value;
                        a = alpha;
                        b = beta;
                    }
                }
            }
            da /= 5.0;
            db /= 5.0;
        }
        if v > best.0 {
            best = (v, a, b);
        }
    }

    let (_, a, b) = best;
    let x = [Complex64::new(a.cos(), 0.0), Complex64::from_polar(a.sin(), b)];
    Ok(finish(h, p0.basis(), &x, DispersionMethod::GridOracle))
}
