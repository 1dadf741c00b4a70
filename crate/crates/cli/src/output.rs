//! Report rows, JSON documents, summaries and trace files.

use std::fs;
use std::path::Path;

use serde::Serialize;
use subqsl_core::bounds::{AngleTrace, BoundReport, DispersionMethod, SpectralWidth};

use crate::error::CliError;

/// Everything computed for one instance.
#[derive(Debug, Clone)]
pub struct InstanceResult {
    pub id: String,
    pub dim: usize,
    pub rank: usize,
    pub v_hp0: f64,
    pub delta_e: f64,
    pub method: DispersionMethod,
    pub spectral: SpectralWidth,
    pub ml_delta: Option<f64>,
    pub reports: Vec<BoundReport>,
    pub trace: Option<AngleTrace>,
}

pub const CSV_HEADER: [&str; 16] = [
    "instance_id",
    "dim",
    "rank",
    "theta",
    "v_hp0",
    "delta_e",
    "e_min",
    "e_max",
    "bound_commutator",
    "bound_dispersion",
    "bound_spectral",
    "measured_T",
    "reason",
    "saturation_commutator",
    "saturation_dispersion",
    "saturation_spectral",
];

/// 17 significant digits; `inf` / `-inf` / `nan` for non-finite values.
pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

fn reason(r: &BoundReport) -> &'static str {
    r.measured.reason().map_or("crossing", |r| r.as_str())
}

fn csv_error(path: &Path, e: csv::Error) -> CliError {
    CliError::Output(format!("{}: {e}", path.display()))
}

pub fn write_reports_csv(path: &Path, results: &[InstanceResult]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    w.write_record(CSV_HEADER).map_err(|e| csv_error(path, e))?;
    for res in results {
        for r in &res.reports {
            let row = [
                res.id.clone(),
                res.dim.to_string(),
                res.rank.to_string(),
                fmt_float(r.theta),
                fmt_float(r.v_hp0),
                fmt_float(r.delta_e),
                fmt_float(r.spectral.e_min),
                fmt_float(r.spectral.e_max),
                fmt_float(r.bound_commutator),
                fmt_float(r.bound_dispersion),
                fmt_float(r.bound_spectral),
                fmt_float(r.measured.time()),
                reason(r).to_string(),
                fmt_float(r.saturation_commutator),
                fmt_float(r.saturation_dispersion),
                fmt_float(r.saturation_spectral),
            ];
            w.write_record(&row).map_err(|e| csv_error(path, e))?;
        }
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SaturationStats {
    pub bound: &'static str,
    /// Rows with a finite saturation ratio.
    pub count: usize,
    pub min: Option<f64>,
    pub mean: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub instances: usize,
    pub rows: usize,
    pub crossings: usize,
    pub reducing: usize,
    pub no_crossing: usize,
    pub saturation: Vec<SaturationStats>,
}

pub fn summarize(results: &[InstanceResult]) -> Summary {
    let rows: Vec<&BoundReport> = results.iter().flat_map(|r| &r.reports).collect();
    let count_reason = |name: &str| rows.iter().filter(|r| reason(r) == name).count();
    let stats = |bound, pick: fn(&BoundReport) -> f64| {
        let xs: Vec<f64> = rows.iter().map(|r| pick(r)).filter(|x| x.is_finite()).collect();
        SaturationStats {
            bound,
            count: xs.len(),
            min: xs.iter().copied().reduce(f64::min),
            mean: (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64),
        }
    };
    Summary {
        instances: results.len(),
        rows: rows.len(),
        crossings: count_reason("crossing"),
        reducing: count_reason("reducing"),
        no_crossing: count_reason("no_crossing"),
        saturation: vec![
            stats("commutator", |r| r.saturation_commutator),
            stats("dispersion", |r| r.saturation_dispersion),
            stats("spectral", |r| r.saturation_spectral),
        ],
    }
}

pub fn write_summary_csv(path: &Path, summary: &Summary) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    w.write_record(["bound", "count", "min", "mean"]).map_err(|e| csv_error(path, e))?;
    for s in &summary.saturation {
        let opt = |x: Option<f64>| x.map_or(String::new(), fmt_float);
        w.write_record([s.bound.to_string(), s.count.to_string(), opt(s.min), opt(s.mean)])
            .map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

#[derive(Serialize)]
struct JsonReport {
    theta: f64,
    bound_commutator: Option<f64>,
    bound_dispersion: Option<f64>,
    bound_spectral: Option<f64>,
    measured_t: Option<f64>,
    reason: &'static str,
    bracket: Option<[f64; 2]>,
    saturation_commutator: Option<f64>,
    saturation_dispersion: Option<f64>,
    saturation_spectral: Option<f64>,
}

#[derive(Serialize)]
struct JsonInstance<'a> {
    instance_id: &'a str,
    dim: usize,
    rank: usize,
    v_hp0: f64,
    delta_e: f64,
    dispersion_method: &'static str,
    e_min: f64,
    e_max: f64,
    width: f64,
    ml_delta: Option<f64>,
    reports: Vec<JsonReport>,
}

#[derive(Serialize)]
struct JsonDocument<'a> {
    instances: Vec<JsonInstance<'a>>,
    summary: &'a Summary,
}

/// JSON document with non-finite values written as `null`.
pub fn reports_json(results: &[InstanceResult], summary: &Summary) -> Result<String, CliError> {
    let instances = results
        .iter()
        .map(|res| JsonInstance {
            instance_id: &res.id,
            dim: res.dim,
            rank: res.rank,
            v_hp0: res.v_hp0,
            delta_e: res.delta_e,
            dispersion_method: res.method.as_str(),
            e_min: res.spectral.e_min,
            e_max: res.spectral.e_max,
            width: res.spectral.width,
            ml_delta: res.ml_delta,
            reports: res
                .reports
                .iter()
                .map(|r| JsonReport {
                    theta: r.theta,
                    bound_commutator: finite(r.bound_commutator),
                    bound_dispersion: finite(r.bound_dispersion),
                    bound_spectral: finite(r.bound_spectral),
                    measured_t: finite(r.measured.time()),
                    reason: reason(r),
                    bracket: r.measured.bracket.map(|(a, b)| [a, b]),
                    saturation_commutator: finite(r.saturation_commutator),
                    saturation_dispersion: finite(r.saturation_dispersion),
                    saturation_spectral: finite(r.saturation_spectral),
                })
                .collect(),
        })
        .collect();
    let doc = JsonDocument { instances, summary };
    serde_json::to_string_pretty(&doc).map_err(|e| CliError::Output(e.to_string()))
}

pub fn write_trace(path: &Path, id: &str, trace: &AngleTrace) -> Result<(), CliError> {
    let mut out = format!(
        "# instance {id} v_hp0 {} step {}\nt,theta_t\n",
        fmt_float(trace.lipschitz),
        fmt_float(trace.step)
    );
    for &(t, a) in &trace.samples {
        out.push_str(&fmt_float(t));
        out.push(',');
        out.push_str(&fmt_float(a));
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| CliError::io(path, e))
}
