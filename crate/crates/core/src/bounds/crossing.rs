//! Sampling `t ↦ ϑ(ran P₀, ran P(t))` and locating its first crossing of `θ`.
//!
//! The angle is `V`-Lipschitz in `t` with `V = ‖[H, P₀]‖`. The search walks
//! the time axis in steps of `resolution / V` and inside each step recurses
//! on halves, discarding an interval `[a, b]` once the Lipschitz envelope
//! `(ϑ(a) + ϑ(b) + V(b − a)) / 2` stays below the target. Left halves are
//! searched first, so the earliest crossing is returned even when the
//! angle is not monotone.

use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;

#[allow(unused_imports)]
use num_traits::Float;

use super::speed::commutator_speed;
use super::Tolerances;
use crate::error::{QslError, Result};
use crate::evolution::ProjectionPath;
use crate::linalg::{hermitian_eigen, singular_values, ComplexMatrix};
use num_complex::Complex64;

/// Sampled angle curve together with the Lipschitz constant behind its step.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleTrace {
    /// `(t, ϑ(t))` pairs, starting at `t = 0` and ending at `t_max`.
    pub samples: Vec<(f64, f64)>,
    pub lipschitz: f64,
    pub step: f64,
}

pub fn angle_trace(path: &ProjectionPath, t_max: f64, resolution: f64) -> Result<AngleTrace> {
    let v = commutator_speed(path.hamiltonian(), path.initial())?;
    angle_trace_with_speed(path, v, t_max, resolution)
}

pub(crate) fn angle_trace_with_speed(
    path: &ProjectionPath,
    v: f64,
    t_max: f64,
    resolution: f64,
) -> Result<AngleTrace> {
    if !(t_max > 0.0) || !t_max.is_finite() {
        return Err(QslError::InvalidArgument("t_max must be positive and finite"));
    }
    if !(resolution > 1e-9 && resolution < 0.1) {
        return Err(QslError::InvalidArgument("resolution must lie in (1e-9, 0.1)"));
    }
    let step = (resolution / v.max(1e-30)).min(t_max / 10.0);
    let angle = StartAngle::new(path);
    let n = (t_max / step).ceil() as usize;
    let mut samples = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let t = (i as f64 * step).min(t_max);
        samples.push((t, angle.at(t)?));
    }
    Ok(AngleTrace { samples, lipschitz: v, step })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnboundedReason {
    /// `[H, P₀] = 0`: the subspace never moves.
    Reducing,
    /// No crossing was found up to `t_max`; later crossings are not excluded.
    NoCrossing,
}

impl UnboundedReason {
    pub fn as_str(self) -> &'static str {
        match self {
            UnboundedReason::Reducing => "reducing",
            UnboundedReason::NoCrossing => "no_crossing",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CrossingTime {
    Finite(f64),
    Unbounded(UnboundedReason),
}

/// `T_θ`, the first time the maximal angle reaches `θ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaTime {
    pub theta: f64,
    pub value: CrossingTime,
    /// `(t_lo, t_hi)` with `ϑ(t_lo) < θ ≤ ϑ(t_hi)` up to the angle tolerance.
    pub bracket: Option<(f64, f64)>,
}

impl ThetaTime {
    /// The crossing time, or `+∞` when unbounded.
    pub fn time(&self) -> f64 {
        match self.value {
            CrossingTime::Finite(t) => t,
            CrossingTime::Unbounded(_) => f64::INFINITY,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.value, CrossingTime::Finite(_))
    }

    pub fn reason(&self) -> Option<UnboundedReason> {
        match self.value {
            CrossingTime::Finite(_) => None,
            CrossingTime::Unbounded(r) => Some(r),
        }
    }
}

pub fn first_crossing_time(path: &ProjectionPath, theta: f64, t_max: f64) -> Result<ThetaTime> {
    first_crossing_time_with(path, theta, t_max, &Tolerances::default())
}

pub fn first_crossing_time_with(
    path: &ProjectionPath,
    theta: f64,
    t_max: f64,
    tol: &Tolerances,
) -> Result<ThetaTime> {
    let v = commutator_speed(path.hamiltonian(), path.initial())?;
    crossing_with_speed(path, v, theta, t_max, tol)
}

pub(crate) fn check_theta(theta: f64) -> Result<()> {
    if !(theta > 0.0 && theta <= FRAC_PI_2) {
        return Err(QslError::InvalidTheta(theta));
    }
    Ok(())
}

pub(crate) fn crossing_with_speed(
    path: &ProjectionPath,
    v: f64,
    theta: f64,
    t_max: f64,
    tol: &Tolerances,
) -> Result<ThetaTime> {
    check_theta(theta)?;
    if !(t_max > 0.0) || !t_max.is_finite() {
        return Err(QslError::InvalidArgument("t_max must be positive and finite"));
    }
    let unbounded = |reason| ThetaTime { theta, value: CrossingTime::Unbounded(reason), bracket: None };
    if v <= tol.zero_rate(path.hamiltonian().norm()) {
        return Ok(unbounded(UnboundedReason::Reducing));
    }

    let resolution = tol.max_resolution.min(theta / 100.0);
    let step = (resolution / v).min(t_max / 10.0);
    let search = Search {
        angle: StartAngle::new(path),
        v,
        target: theta - tol.angle,
        time_tol: tol.time(t_max),
    };
    let mut a = 0.0;
    let mut fa = 0.0;
    let mut i = 0usize;
    while a < t_max {
        i += 1;
        let b = (i as f64 * step).min(t_max);
        let fb = search.angle(b)?;
        if let Some((lo, hi)) = search.descend(a, fa, b, fb)? {
            return Ok(ThetaTime { theta, value: CrossingTime::Finite(hi), bracket: Some((lo, hi)) });
        }
        a = b;
        fa = fb;
    }
    Ok(unbounded(UnboundedReason::NoCrossing))
}

/// `ϑ(ran P₀, ran P(t))` in the eigenbasis of `H`, where `U(t)` is the
/// diagonal `D(t)`. With `X = V*W₀` and `Y = V*W₀^⊥`, the cosine is
/// `σ_min(X* D X)` and the sine is `σ_max(Y* D X)`; the latter comes from
/// the top eigenvalue of the `k×k` Gram matrix, which is accurate to
/// relative roundoff. No `n×n` factorization is needed per time.
pub(crate) struct StartAngle {
    x: ComplexMatrix,
    y: ComplexMatrix,
    energies: Vec<f64>,
}

impl StartAngle {
    pub(crate) fn new(path: &ProjectionPath) -> Self {
        let eig = path.hamiltonian().eigen();
        let v = eig.eigenvectors();
        let p0 = path.initial();
        Self {
            x: v.adjoint_mul(p0.basis()),
            y: v.adjoint_mul(p0.complement().basis()),
            energies: eig.eigenvalues().to_vec(),
        }
    }

    pub(crate) fn at(&self, t: f64) -> Result<f64> {
        let (n, k) = (self.x.rows(), self.x.cols());
        if t == 0.0 || k == 0 || k == n {
            return Ok(0.0);
        }
        let phases: Vec<Complex64> = self.energies.iter().map(|&l| Complex64::from_polar(1.0, -l * t)).collect();
        let dx = ComplexMatrix::from_fn(n, k, |i, j| phases[i] * self.x[(i, j)]);
        let cos = singular_values(&self.x.adjoint_mul(&dx))?.last().copied().unwrap_or(1.0).min(1.0);
        let cross = self.y.adjoint_mul(&dx);
        let sin_sq = hermitian_eigen(&cross.adjoint_mul(&cross).hermitian_part())?.max();
        Ok(sin_sq.max(0.0).sqrt().min(1.0).atan2(cos.max(0.0)))
    }
}

struct Search {
    angle: StartAngle,
    v: f64,
    target: f64,
    time_tol: f64,
}

impl Search {
    fn angle(&self, t: f64) -> Result<f64> {
        self.angle.at(t)
    }

    /// Earliest `(lo, hi)` of width at most `time_tol` in `[a, b]` with
    /// `ϑ(lo) < target ≤ ϑ(hi)`; requires `fa < target`.
    fn descend(&self, a: f64, fa: f64, b: f64, fb: f64) -> Result<Option<(f64, f64)>> {
        if fb < self.target && 0.5 * (fa + fb + self.v * (b - a)) < self.target {
            return Ok(None);
        }
        if fb >= self.target && b - a <= self.time_tol {
            return Ok(Some((a, b)));
        }
        // A near-tangential touch can be far narrower than the time
        // tolerance, so unresolved intervals keep splitting down to roundoff.
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            return Ok((fb >= self.target).then_some((a, b)));
        }
        let fm = self.angle(m)?;
        if let Some(hit) = self.descend(a, fa, m, fm)? {
            return Ok(Some(hit));
        }
        self.descend(m, fm, b, fb)
    }
}
