//! Speeds, dispersions and the first time the maximal angle reaches `θ`.

mod crossing;
mod dispersion;
mod report;
mod speed;

pub use crossing::{
    angle_trace, first_crossing_time, first_crossing_time_with, AngleTrace, CrossingTime, ThetaTime,
    UnboundedReason,
};
pub use dispersion::{
    dispersion_grid_oracle, subspace_dispersion, subspace_dispersion_with, DispersionMethod, DispersionResult,
    OptimizerSettings,
};
pub use report::{bound_report, BoundReport, InstanceAnalysis};
pub use speed::{
    commutator_speed, energy_variance, margolus_levitin_delta, spectral_width, SpectralWidth,
};

/// Numerical tolerances shared by the crossing search and the report checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// A rate at or below `reducing_speed · (1 + ‖H‖)` counts as zero.
    pub reducing_speed: f64,
    /// The search targets `θ − angle` so that a tangential touch of `θ` is found.
    pub angle: f64,
    /// Crossing times are resolved to `time_rel · (1 + t_max)`.
    pub time_rel: f64,
    /// Slack on the rate inequalities `V ≤ ΔE ≤ width/2`.
    pub rate: f64,
    /// Upper bound on the angular scan resolution.
    pub max_resolution: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            reducing_speed: 1e-12,
            angle: 1e-12,
            time_rel: 1e-10,
            rate: 1e-8,
            max_resolution: 1e-3,
        }
    }
}

impl Tolerances {
    pub fn zero_rate(&self, h_norm: f64) -> f64 {
        self.reducing_speed * (1.0 + h_norm)
    }

    pub fn time(&self, t_max: f64) -> f64 {
        self.time_rel * (1.0 + t_max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ReportSettings {
    pub tolerances: Tolerances,
    pub optimizer: OptimizerSettings,
}
