//! Run configuration, read from TOML.
//!
//! ```toml
//! theta_list = [0.39269908169872414, 1.5707963267948966]
//! t_max = 20.0
//! resolution = 0.001          # optional, angle step of trace files
//! output = "out"              # optional, relative to the config file
//! formats = ["csv", "json"]   # optional
//! jobs = 4                    # optional, worker threads
//!
//! [scenario]
//! kind = "ensemble"           # or "two_level" / "explicit"
//! ensemble = "gue"            # or "diagonal_plus_coupling"
//! dim = 6
//! rank = 2
//! seed = 42
//! count = 10
//!
//! [tolerances]                # optional, every key optional
//! angle = 1e-12
//! ```
//!
//! Unknown keys anywhere are errors.

use std::f64::consts::FRAC_PI_2;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use subqsl_core::bounds::{OptimizerSettings, ReportSettings, Tolerances};
use subqsl_core::scenarios::{EnsembleKind, EnsembleSpec};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub theta_list: Vec<f64>,
    pub t_max: f64,
    #[serde(default = "default_resolution")]
    pub resolution: f64,
    #[serde(default = "default_output")]
    pub output: PathBuf,
    #[serde(default = "default_formats")]
    pub formats: Vec<Format>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jobs: Option<usize>,
    pub scenario: ScenarioConfig,
    #[serde(default, skip_serializing_if = "ToleranceConfig::is_empty")]
    pub tolerances: ToleranceConfig,
}

fn default_resolution() -> f64 {
    1e-3
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

fn default_formats() -> Vec<Format> {
    vec![Format::Csv, Format::Json]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScenarioConfig {
    TwoLevel {
        e1: f64,
        e2: f64,
    },
    Ensemble {
        ensemble: EnsembleName,
        dim: usize,
        rank: usize,
        seed: u64,
        count: usize,
    },
    /// Paths are relative to the config file.
    Explicit {
        matrix: PathBuf,
        basis: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnsembleName {
    Gue,
    DiagonalPlusCoupling,
}

impl From<EnsembleName> for EnsembleKind {
    fn from(name: EnsembleName) -> Self {
        match name {
            EnsembleName::Gue => EnsembleKind::Gue,
            EnsembleName::DiagonalPlusCoupling => EnsembleKind::DiagonalPlusCoupling,
        }
    }
}

/// Overrides of the numerical defaults; absent keys keep the default.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reducing_speed: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angle: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_rel: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_resolution: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimizer_restarts: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimizer_max_iterations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimizer_gradient_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimizer_seed: Option<u64>,
}

impl ToleranceConfig {
    pub fn is_empty(&self) -> bool {
        *self == Self::default()
    }

    pub fn settings(&self) -> ReportSettings {
        let t = Tolerances::default();
        let o = OptimizerSettings::default();
        ReportSettings {
            tolerances: Tolerances {
                reducing_speed: self.reducing_speed.unwrap_or(t.reducing_speed),
                angle: self.angle.unwrap_or(t.angle),
                time_rel: self.time_rel.unwrap_or(t.time_rel),
                rate: self.rate.unwrap_or(t.rate),
                max_resolution: self.max_resolution.unwrap_or(t.max_resolution),
            },
            optimizer: OptimizerSettings {
                restarts: self.optimizer_restarts.unwrap_or(o.restarts),
                max_iterations: self.optimizer_max_iterations.unwrap_or(o.max_iterations),
                gradient_tol: self.optimizer_gradient_tol.unwrap_or(o.gradient_tol),
                seed: self.optimizer_seed.unwrap_or(o.seed),
                ..o
            },
        }
    }
}

fn invalid(field: impl AsRef<str>, msg: impl AsRef<str>) -> CliError {
    CliError::Config(format!("{}: {}", field.as_ref(), msg.as_ref()))
}

fn positive(field: &str, x: f64) -> Result<(), CliError> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(invalid(field, format!("{x} must be positive and finite")))
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.theta_list.is_empty() {
            return Err(invalid("theta_list", "at least one angle is required"));
        }
        for (i, &theta) in self.theta_list.iter().enumerate() {
            if !(theta > 0.0 && theta <= FRAC_PI_2) {
                return Err(invalid(format!("theta_list[{i}]"), format!("{theta} is outside (0, π/2]")));
            }
        }
        positive("t_max", self.t_max)?;
        if !(self.resolution > 1e-9 && self.resolution < 0.1) {
            return Err(invalid("resolution", format!("{} is outside (1e-9, 0.1)", self.resolution)));
        }
        if self.formats.is_empty() {
            return Err(invalid("formats", "at least one of \"csv\", \"json\" is required"));
        }
        if self.jobs == Some(0) {
            return Err(invalid("jobs", "must be at least 1"));
        }
        match &self.scenario {
            ScenarioConfig::TwoLevel { e1, e2 } => {
                if !e1.is_finite() || !e2.is_finite() {
                    return Err(invalid("scenario.e1/e2", "energies must be finite"));
                }
                if e1 == e2 {
                    return Err(invalid("scenario.e2", "must differ from e1"));
                }
            }
            ScenarioConfig::Ensemble { .. } => {
                let spec = self.ensemble_spec().expect("ensemble scenario");
                if spec.count == 0 {
                    return Err(invalid("scenario.count", "must be at least 1"));
                }
                if spec.dim < 2 {
                    return Err(invalid("scenario.dim", "must be at least 2"));
                }
                if spec.rank == 0 || spec.rank >= spec.dim {
                    return Err(invalid("scenario.rank", format!("must lie in [1, {}]", spec.dim - 1)));
                }
            }
            ScenarioConfig::Explicit { .. } => {}
        }
        let t = &self.tolerances;
        for (name, value) in [
            ("tolerances.reducing_speed", t.reducing_speed),
            ("tolerances.angle", t.angle),
            ("tolerances.time_rel", t.time_rel),
            ("tolerances.rate", t.rate),
            ("tolerances.max_resolution", t.max_resolution),
            ("tolerances.optimizer_gradient_tol", t.optimizer_gradient_tol),
        ] {
            if let Some(v) = value {
                positive(name, v)?;
            }
        }
        if t.optimizer_restarts == Some(0) {
            return Err(invalid("tolerances.optimizer_restarts", "must be at least 1"));
        }
        Ok(())
    }

    pub fn ensemble_spec(&self) -> Option<EnsembleSpec> {
        match self.scenario {
            ScenarioConfig::Ensemble { ensemble, dim, rank, seed, count } => {
                Some(EnsembleSpec { dim, rank, kind: ensemble.into(), seed, count })
            }
            _ => None,
        }
    }

    /// Applies a `--seed` override: the ensemble seed and the optimizer seed.
    pub fn override_seed(&mut self, new_seed: u64) {
        if let ScenarioConfig::Ensemble { seed, .. } = &mut self.scenario {
            *seed = new_seed;
        }
        self.tolerances.optimizer_seed = Some(new_seed);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_LEVEL: &str = r#"
theta_list = [1.5707963267948966]
t_max = 10.0

[scenario]
kind = "two_level"
e1 = 0.0
e2 = 1.0
"#;

    #[test]
    fn defaults_fill_in() {
        let cfg = RunConfig::parse(TWO_LEVEL).unwrap();
        assert_eq!(cfg.resolution, 1e-3);
        assert_eq!(cfg.formats, vec![Format::Csv, Format::Json]);
        assert_eq!(cfg.output, PathBuf::from("out"));
        assert_eq!(cfg.tolerances.settings(), ReportSettings::default());
    }

    #[test]
    fn out_of_range_theta_names_the_field() {
        let text = TWO_LEVEL.replace("[1.5707963267948966]", "[0.5, 2.0]");
        let err = RunConfig::parse(&text).unwrap_err().to_string();
        assert!(err.contains("theta_list[1]"), "{err}");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = RunConfig::parse(&format!("{TWO_LEVEL}\n[tolerances]\nangel = 1e-9\n")).unwrap_err().to_string();
        assert!(err.contains("angel"), "{err}");
        let err = RunConfig::parse(&TWO_LEVEL.replace("e2 = 1.0", "e2 = 1.0\ne3 = 2.0")).unwrap_err().to_string();
        assert!(err.contains("e3"), "{err}");
        let err = RunConfig::parse(&format!("speed = 1\n{TWO_LEVEL}")).unwrap_err().to_string();
        assert!(err.contains("speed"), "{err}");
    }

    #[test]
    fn parse_errors_carry_a_line() {
        let err = RunConfig::parse("theta_list = [0.5]\nt_max = \"ten\"\n").unwrap_err().to_string();
        assert!(err.contains("line 2"), "{err}");
    }

    #[test]
    fn seed_override() {
        let text = r#"
theta_list = [0.5]
t_max = 5.0
[scenario]
kind = "ensemble"
ensemble = "gue"
dim = 4
rank = 2
seed = 1
count = 3
"#;
        let mut cfg = RunConfig::parse(text).unwrap();
        cfg.override_seed(99);
        assert_eq!(cfg.ensemble_spec().unwrap().seed, 99);
        assert_eq!(cfg.tolerances.settings().optimizer.seed, 99);
        let bad = text.replace("rank = 2", "rank = 4");
        assert!(RunConfig::parse(&bad).unwrap_err().to_string().contains("scenario.rank"));
    }
}
