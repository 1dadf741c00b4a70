use super::crossing::{angle_trace_with_speed, crossing_with_speed, AngleTrace, ThetaTime};
use super::dispersion::{subspace_dispersion_with, DispersionResult};
use super::speed::{commutator_speed, margolus_levitin_delta, spectral_width, SpectralWidth};
use super::ReportSettings;
use crate::error::{BoundViolation, QslError, Result};
use crate::evolution::ProjectionPath;
use crate::linalg::HermitianOperator;
use crate::subspace::OrthogonalProjector;

/// Rates and bounds for one `(θ, t_max)` on one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub theta: f64,
    pub v_hp0: f64,
    pub delta_e: f64,
    pub spectral: SpectralWidth,
    /// `θ / V`, or `+∞` when `V` vanishes.
    pub bound_commutator: f64,
    /// `θ / ΔE`, or `+∞` when `ΔE` vanishes.
    pub bound_dispersion: f64,
    /// `2θ / (E_max − E_min)`, or `+∞` for a multiple of the identity.
    pub bound_spectral: f64,
    pub measured: ThetaTime,
    pub saturation_commutator: f64,
    pub saturation_dispersion: f64,
    pub saturation_spectral: f64,
    /// Mean energy above the ground level; only for rank-one subspaces.
    pub ml_delta: Option<f64>,
}

/// Per-instance quantities that do not depend on `θ`.
#[derive(Debug, Clone)]
pub struct InstanceAnalysis {
    path: ProjectionPath,
    v_hp0: f64,
    dispersion: DispersionResult,
    spectral: SpectralWidth,
    ml_delta: Option<f64>,
    settings: ReportSettings,
}

fn violation(check: &'static str, lhs: f64, rhs: f64) -> QslError {
    QslError::BoundViolation(BoundViolation { check, lhs, rhs })
}

impl InstanceAnalysis {
    /// Computes `V`, `ΔE` and the spectral width and checks
    /// `V ≤ ΔE ≤ (E_max − E_min)/2`.
    pub fn new(h: HermitianOperator, p0: OrthogonalProjector, settings: ReportSettings) -> Result<Self> {
        let v_hp0 = commutator_speed(&h, &p0)?;
        let dispersion = subspace_dispersion_with(&h, &p0, &settings.optimizer)?;
        let spectral = spectral_width(&h);
        let ml_delta = if p0.rank() == 1 {
            Some(margolus_levitin_delta(&h, &p0.basis().column(0))?)
        } else {
            None
        };
        let slack = settings.tolerances.rate;
        if v_hp0 > dispersion.value + slack {
            return Err(violation("commutator speed <= dispersion", v_hp0, dispersion.value));
        }
        if dispersion.value > 0.5 * spectral.width + slack {
            return Err(violation("dispersion <= half width", dispersion.value, 0.5 * spectral.width));
        }
        let path = ProjectionPath::new(h, p0)?;
        Ok(Self { path, v_hp0, dispersion, spectral, ml_delta, settings })
    }

    pub fn path(&self) -> &ProjectionPath {
        &self.path
    }

    pub fn v_hp0(&self) -> f64 {
        self.v_hp0
    }

    pub fn dispersion(&self) -> &DispersionResult {
        &self.dispersion
    }

    pub fn spectral(&self) -> SpectralWidth {
        self.spectral
    }

    pub fn ml_delta(&self) -> Option<f64> {
        self.ml_delta
    }

    pub fn settings(&self) -> &ReportSettings {
        &self.settings
    }

    pub fn trace(&self, t_max: f64, resolution: f64) -> Result<AngleTrace> {
        angle_trace_with_speed(&self.path, self.v_hp0, t_max, resolution)
    }

    /// Measures `T_θ` up to `t_max` and checks it against the three bounds.
    pub fn report(&self, theta: f64, t_max: f64) -> Result<BoundReport> {
        let tol = &self.settings.tolerances;
        let measured = crossing_with_speed(&self.path, self.v_hp0, theta, t_max, tol)?;
        let zero = tol.zero_rate(self.path.hamiltonian().norm());
        let bound = |rate: f64| if rate <= zero { f64::INFINITY } else { theta / rate };
        let bound_commutator = bound(self.v_hp0);
        let bound_dispersion = bound(self.dispersion.value);
        let bound_spectral = bound(0.5 * self.spectral.width);

        let time = measured.time();
        let time_tol = tol.time(t_max);
        for (check, rate) in [
            ("crossing time >= theta / commutator speed", self.v_hp0),
            ("crossing time >= theta / dispersion", self.dispersion.value),
            ("crossing time >= 2 theta / width", 0.5 * self.spectral.width),
        ] {
            let floor = (theta - tol.angle) / (rate + tol.rate) - time_tol;
            if time < floor {
                return Err(violation(check, time, floor));
            }
        }

        Ok(BoundReport {
            theta,
            v_hp0: self.v_hp0,
            delta_e: self.dispersion.value,
            spectral: self.spectral,
            bound_commutator,
            bound_dispersion,
            bound_spectral,
            measured,
            saturation_commutator: saturation(time, bound_commutator),
            saturation_dispersion: saturation(time, bound_dispersion),
            saturation_spectral: saturation(time, bound_spectral),
            ml_delta: self.ml_delta,
        })
    }
}

/// `measured / bound`; `NaN` when both are infinite.
fn saturation(measured: f64, bound: f64) -> f64 {
    if measured.is_infinite() && bound.is_infinite() {
        f64::NAN
    } else {
        measured / bound
    }
}

pub fn bound_report(
    h: &HermitianOperator,
    p0: &OrthogonalProjector,
    theta: f64,
    t_max: f64,
) -> Result<BoundReport> {
    InstanceAnalysis::new(h.clone(), p0.clone(), ReportSettings::default())?.report(theta, t_max)
}
