//! The `run` and `trace` commands.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use subqsl_core::bounds::{InstanceAnalysis, ReportSettings};

use crate::config::{Format, RunConfig};
use crate::error::CliError;
use crate::instances::{build_instances, Instance};
use crate::output::{
    reports_json, summarize, write_reports_csv, write_summary_csv, write_trace, InstanceResult, Summary,
};

/// Command-line overrides applied on top of a loaded config.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    /// Resolved against the working directory.
    pub output: Option<PathBuf>,
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub formats: Option<Vec<Format>>,
}

/// A loaded config with overrides applied and the output directory resolved.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub config: RunConfig,
    pub base_dir: PathBuf,
    pub output_dir: PathBuf,
}

pub fn prepare(config_path: &Path, overrides: &Overrides) -> Result<Prepared, CliError> {
    let mut config = RunConfig::load(config_path)?;
    if let Some(seed) = overrides.seed {
        config.override_seed(seed);
    }
    if let Some(jobs) = overrides.jobs {
        config.jobs = Some(jobs);
    }
    if let Some(formats) = &overrides.formats {
        config.formats = formats.clone();
    }
    config.validate()?;
    let base_dir = config_path.parent().map(Path::to_path_buf).unwrap_or_default();
    let output_dir = match &overrides.output {
        Some(dir) => dir.clone(),
        None => base_dir.join(&config.output),
    };
    Ok(Prepared { config, base_dir, output_dir })
}

/// Runs `f` on every instance in a pool of `jobs` threads; results keep instance order.
pub fn par_map<T: Send>(
    instances: &[Instance],
    jobs: Option<usize>,
    f: impl Fn(usize, &Instance) -> T + Sync + Send,
) -> Result<Vec<T>, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| CliError::Config(format!("jobs: {e}")))?;
    Ok(pool.install(|| instances.par_iter().enumerate().map(|(i, inst)| f(i, inst)).collect()))
}

pub fn analyze(instance: &Instance, cfg: &RunConfig, settings: ReportSettings, with_reports: bool) -> Result<InstanceResult, CliError> {
    let numeric = |e| CliError::numeric(&instance.id, e);
    let analysis =
        InstanceAnalysis::new(instance.hamiltonian.clone(), instance.subspace.clone(), settings).map_err(numeric)?;
    let reports = if with_reports {
        cfg.theta_list.iter().map(|&theta| analysis.report(theta, cfg.t_max)).collect::<Result<_, _>>().map_err(numeric)?
    } else {
        Vec::new()
    };
    let trace = analysis.trace(cfg.t_max, cfg.resolution).map_err(numeric)?;
    log::debug!("{}: V = {}, ΔE = {}", instance.id, analysis.v_hp0(), analysis.dispersion().value);
    Ok(InstanceResult {
        id: instance.id.clone(),
        dim: instance.hamiltonian.dim(),
        rank: instance.subspace.rank(),
        v_hp0: analysis.v_hp0(),
        delta_e: analysis.dispersion().value,
        method: analysis.dispersion().method,
        spectral: analysis.spectral(),
        ml_delta: analysis.ml_delta(),
        reports,
        trace: Some(trace),
    })
}

/// Results that succeeded plus the most severe failure, if any.
pub struct Outcome {
    pub results: Vec<InstanceResult>,
    pub summary: Summary,
    pub failure: Option<CliError>,
}

fn create_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

fn collect(all: Vec<Result<InstanceResult, CliError>>) -> (Vec<InstanceResult>, Option<CliError>) {
    let mut results = Vec::new();
    let mut failure: Option<CliError> = None;
    for r in all {
        match r {
            Ok(r) => results.push(r),
            Err(e) => {
                eprintln!("error: {e}");
                let worse = failure.as_ref().is_none_or(|f| e.exit_code() > f.exit_code());
                if worse {
                    failure = Some(e);
                }
            }
        }
    }
    (results, failure)
}

fn write_traces(dir: &Path, results: &[InstanceResult]) -> Result<(), CliError> {
    let traces = dir.join("traces");
    create_dir(&traces)?;
    for r in results {
        if let Some(trace) = &r.trace {
            write_trace(&traces.join(format!("{}.csv", r.id)), &r.id, trace)?;
        }
    }
    Ok(())
}

/// Reports, summaries and traces for every instance.
pub fn run(prepared: &Prepared) -> Result<Outcome, CliError> {
    let cfg = &prepared.config;
    let settings = cfg.tolerances.settings();
    let instances = build_instances(cfg, &prepared.base_dir)?;
    let all = par_map(&instances, cfg.jobs, |_, inst| analyze(inst, cfg, settings, true))?;
    let (results, failure) = collect(all);
    let summary = summarize(&results);

    let dir = &prepared.output_dir;
    create_dir(dir)?;
    if cfg.formats.contains(&Format::Csv) {
        write_reports_csv(&dir.join("reports.csv"), &results)?;
        write_summary_csv(&dir.join("summary.csv"), &summary)?;
    }
    if cfg.formats.contains(&Format::Json) {
        let path = dir.join("reports.json");
        fs::write(&path, reports_json(&results, &summary)?).map_err(|e| CliError::io(&path, e))?;
    }
    write_traces(dir, &results)?;
    Ok(Outcome { results, summary, failure })
}

/// Trace files only.
pub fn trace(prepared: &Prepared) -> Result<Outcome, CliError> {
    let cfg = &prepared.config;
    let settings = cfg.tolerances.settings();
    let instances = build_instances(cfg, &prepared.base_dir)?;
    let all = par_map(&instances, cfg.jobs, |_, inst| analyze(inst, cfg, settings, false))?;
    let (results, failure) = collect(all);
    write_traces(&prepared.output_dir, &results)?;
    let summary = summarize(&results);
    Ok(Outcome { results, summary, failure })
}

pub fn print_summary(out: &mut impl Write, summary: &Summary) -> std::io::Result<()> {
    writeln!(
        out,
        "instances {}  rows {}  crossings {}  reducing {}  no_crossing {}",
        summary.instances, summary.rows, summary.crossings, summary.reducing, summary.no_crossing
    )?;
    writeln!(out, "{:<12} {:>6} {:>12} {:>12}", "saturation", "count", "min", "mean")?;
    for s in &summary.saturation {
        let opt = |x: Option<f64>| x.map_or("-".to_string(), |v| format!("{v:.6}"));
        writeln!(out, "{:<12} {:>6} {:>12} {:>12}", s.bound, s.count, opt(s.min), opt(s.mean))?;
    }
    Ok(())
}
