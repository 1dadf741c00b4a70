//! The `verify` command: numerical invariants checked on every instance.
//!
//! Each check records `lhs ≤ rhs` (or `lhs < rhs` for strict checks); the
//! margin `lhs − rhs` is reported per check as its worst case.

use std::f64::consts::FRAC_PI_2;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use subqsl_core::bounds::{
    dispersion_grid_oracle, energy_variance, first_crossing_time_with, InstanceAnalysis, UnboundedReason,
};
use subqsl_core::evolution::{block_decompose, commutator, derivative_check};
use subqsl_core::linalg::{hermitian_eigen, normalized, operator_norm, ComplexMatrix, I};
use subqsl_core::scenarios::{standard_complex_gaussian, two_level};
use subqsl_core::subspace::{gap_distance, maximal_angle, relative_angle};
use subqsl_core::QslError;

use crate::config::{RunConfig, ScenarioConfig};
use crate::error::CliError;
use crate::instances::{build_instances, Instance};
use crate::run::{par_map, Prepared};

/// Time pairs sampled per instance.
const PAIRS: usize = 20;
/// Grid of the rank-two dispersion oracle.
const ORACLE_GRID: usize = 500;
const ORACLE_MAX_DIM: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Record {
    pub check: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    pub strict: bool,
}

impl Record {
    pub fn passed(&self) -> bool {
        if self.strict { self.lhs < self.rhs } else { self.lhs <= self.rhs }
    }
}

/// Aggregate of one check over all instances.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckRow {
    pub check: &'static str,
    pub cases: usize,
    pub failed: usize,
    pub worst_margin: f64,
}

#[derive(Default)]
struct Recorder {
    records: Vec<Record>,
}

impl Recorder {
    fn le(&mut self, check: &'static str, lhs: f64, rhs: f64) {
        self.records.push(Record { check, lhs, rhs, strict: false });
    }

    fn lt(&mut self, check: &'static str, lhs: f64, rhs: f64) {
        self.records.push(Record { check, lhs, rhs, strict: true });
    }

    fn holds(&mut self, check: &'static str, ok: bool) {
        self.le(check, if ok { 0.0 } else { 1.0 }, 0.0);
    }
}

/// All checks on one instance; `two_level` carries the energies of the closed-form scenario.
pub fn check_instance(
    instance: &Instance,
    index: usize,
    cfg: &RunConfig,
    two_level_energies: Option<(f64, f64)>,
) -> Result<Vec<Record>, QslError> {
    let mut rec = Recorder::default();
    let settings = cfg.tolerances.settings();
    let tol = settings.tolerances;
    let h = &instance.hamiltonian;
    let p0 = &instance.subspace;
    let dim = h.dim();
    let rank = p0.rank();
    let h_norm = h.norm();
    let scale = 1.0 + h_norm;
    let mut rng = ChaCha8Rng::seed_from_u64(0x7e57_c4ec);
    rng.set_stream(index as u64);

    // Eigensolver and projector.
    let eig = h.eigen();
    let fresh = hermitian_eigen(h.matrix())?;
    rec.le("eigen_reconstruction", (&fresh.reconstruct() - h.matrix()).max_abs(), 1e-10 * scale);
    let v = eig.eigenvectors();
    rec.le("eigen_orthonormality", (&v.adjoint_mul(v) - &ComplexMatrix::identity(dim)).max_abs(), 1e-10);
    rec.le("projector_validity", p0.matrix().hermitian_defect(), 1e-10);
    let pm = p0.matrix();
    rec.le("projector_validity", (&pm.matmul(pm) - pm).max_abs(), 1e-10);

    // Analysis; a breach of V ≤ ΔE ≤ width/2 is a failed check, not an abort.
    let analysis = match InstanceAnalysis::new(h.clone(), p0.clone(), settings) {
        Ok(a) => a,
        Err(QslError::BoundViolation(b)) => {
            rec.le("rate_chain", b.lhs, b.rhs + tol.rate);
            return Ok(rec.records);
        }
        Err(e) => return Err(e),
    };
    let speed = analysis.v_hp0();
    let delta_e = analysis.dispersion().value;
    let width = analysis.spectral().width;
    let path = analysis.path();
    rec.le("rate_chain", speed, delta_e + tol.rate);
    rec.le("rate_chain", delta_e, 0.5 * width + tol.rate);

    // Three formulas for the commutator speed.
    let q = p0.complement();
    let phq = pm.matmul(h.matrix()).matmul(q.matrix());
    let qhp = q.matrix().matmul(h.matrix()).matmul(pm);
    rec.le("speed_formulas", (speed - operator_norm(&phq)?).abs(), 1e-10 * scale);
    rec.le("speed_formulas", (speed - operator_norm(&qhp)?).abs(), 1e-10 * scale);
    if rank == 1 {
        rec.le("rank_one_speed_equals_dispersion", (speed - delta_e).abs(), tol.rate);
    }
    if rank > 0 && rank < dim {
        let blocks = block_decompose(h, p0)?;
        rec.le("block_reassembly", (&blocks.reassemble() - h.matrix()).max_abs(), 1e-10 * scale);
        rec.le("block_reassembly", (&blocks.c - &blocks.b.adjoint()).max_abs(), 1e-10 * scale);
        rec.le("block_speed", (speed - operator_norm(&blocks.b)?).abs(), 1e-10 * scale);
    }

    // Variance of random unit vectors in ran P₀.
    if rank > 0 {
        let shifted = h.shifted(0.5 * (analysis.spectral().e_min + analysis.spectral().e_max))?;
        let basis = p0.basis();
        for _ in 0..PAIRS {
            let coeffs: Vec<_> = (0..rank).map(|_| standard_complex_gaussian(&mut rng)).collect();
            let f = normalized(&basis.mul_vec(&coeffs));
            let var = energy_variance(h, &f)?;
            rec.le("variance_quarter_width", var, 0.25 * width * width + 1e-10 * scale * scale);
            // Compared as variances: a square root would amplify roundoff.
            rec.le("variance_at_most_dispersion", var, (delta_e + tol.rate).powi(2) + 1e-14 * scale * scale);
            let var_shifted = energy_variance(&shifted, &f)?;
            rec.le("variance_shift_invariance", (var - var_shifted).abs(), 1e-9 * scale * scale);
        }
    }

    // Sampled time pairs.
    let horizon = cfg.t_max.min(10.0 / scale);
    for _ in 0..PAIRS {
        let s: f64 = rng.random_range(0.0..cfg.t_max);
        let t: f64 = rng.random_range(0.0..cfg.t_max);
        let (ps, pt) = (path.at(s), path.at(t));
        let dt = (t - s).abs();
        let gap = gap_distance(&ps, &pt)?;
        let angle = maximal_angle(&ps, &pt)?;
        rec.le("gap_lipschitz", gap, speed * dt + 1e-9);
        rec.le("angle_lipschitz", angle, speed * dt + 1e-9);
        rec.le("angle_dispersion", angle, delta_e * dt + 1e-9 + tol.rate * dt);
        rec.le("angle_spectral", angle, 0.5 * width * dt + 1e-9);
        let cross_st = operator_norm(&ps.complement().matrix().matmul(pt.matrix()))?;
        let cross_ts = operator_norm(&pt.complement().matrix().matmul(ps.matrix()))?;
        rec.le("gap_cross_blocks", (gap - cross_st.max(cross_ts)).abs(), 1e-10);
        if gap > 1e-3 {
            rec.lt("angle_exceeds_gap", gap, angle);
        }
        rec.le("path_rank", (pt.rank() as f64 - rank as f64).abs(), 0.0);
        if rank > 0 && rank < dim {
            let rel = relative_angle(&ps, &pt)?.max(relative_angle(&pt, &ps)?);
            rec.le("angle_relative_max", (angle - rel).abs(), 1e-10);
        }
        let a0s = maximal_angle(p0, &ps)?;
        let a0t = maximal_angle(p0, &pt)?;
        rec.le("angle_triangle", a0t, a0s + angle + 1e-10);
        rec.le("angle_symmetry", (angle - maximal_angle(&pt, &ps)?).abs(), 0.0);

        let ut = path.propagator().at(t);
        let us = path.propagator().at(s);
        let unitary = (&ut.adjoint_mul(&ut) - &ComplexMatrix::identity(dim)).max_abs();
        rec.le("propagator_unitary", unitary, 1e-10);
        let group = (&path.propagator().at(s + t) - &us.matmul(&ut)).max_abs();
        rec.le("propagator_group_law", group, 1e-9 * (1.0 + h_norm * (s + t)));

        let tau: f64 = rng.random_range(0.0..horizon);
        let k = commutator(h, &path.at(tau))?.scale(I);
        let norm = hermitian_eigen(&k)?.spectral_radius();
        rec.le("commutator_norm_invariance", (norm - speed).abs(), 1e-10 * scale);
    }

    // Derivative defect decays at second order.
    if speed > tol.zero_rate(h_norm) {
        let h0 = 1e-2 / scale;
        for _ in 0..2 {
            let t: f64 = rng.random_range(0.0..horizon);
            let defects: Vec<f64> =
                (0..4).map(|j| derivative_check(path, t, h0 / f64::from(1u32 << j))).collect::<Result<_, _>>()?;
            if defects[0] > 1e-9 {
                for w in defects.windows(2) {
                    let ratio = w[0] / w[1];
                    rec.le("derivative_second_order", 3.5, ratio);
                    rec.le("derivative_second_order", ratio, 4.5);
                }
            }
        }
    }

    if rank == 2 && dim <= ORACLE_MAX_DIM {
        let oracle = dispersion_grid_oracle(h, p0, ORACLE_GRID)?;
        rec.le("dispersion_grid_oracle", oracle.value - delta_e, 1e-6);
    }

    // Reports for every configured angle.
    let reducing = speed <= tol.zero_rate(h_norm);
    for &theta in &cfg.theta_list {
        match analysis.report(theta, cfg.t_max) {
            Ok(r) => {
                rec.holds("bound_report", true);
                if reducing {
                    rec.holds("reducing_unbounded", r.measured.reason() == Some(UnboundedReason::Reducing));
                }
                if width <= tol.zero_rate(h_norm) {
                    rec.holds("identity_spectral_unbounded", r.bound_spectral.is_infinite());
                }
                if rank == 1 && r.measured.is_finite() {
                    let floor = (theta - tol.angle) / (delta_e + tol.rate) - tol.time(cfg.t_max);
                    rec.le("fleming", floor, r.measured.time());
                }
                if let Some((e1, e2)) = two_level_energies {
                    let expected = theta / (0.5 * (e2 - e1).abs());
                    if expected <= cfg.t_max {
                        rec.le("two_level_saturation", (r.measured.time() - expected).abs(), 1e-8 * expected);
                        for sat in [r.saturation_commutator, r.saturation_dispersion, r.saturation_spectral] {
                            rec.le("two_level_saturation", (sat - 1.0).abs(), 1e-8);
                        }
                    }
                }
            }
            Err(QslError::BoundViolation(b)) => rec.le("bound_report", b.rhs, b.lhs),
            Err(e) => return Err(e),
        }
    }

    // Orthogonalization bounds for a single state.
    if let Some(ml) = analysis.ml_delta() {
        let orth = first_crossing_time_with(path, FRAC_PI_2, cfg.t_max, &tol)?;
        if orth.is_finite() {
            let t = orth.time();
            let slack = tol.time(cfg.t_max);
            rec.le("mandelstam_tamm", FRAC_PI_2 / (delta_e + tol.rate) - slack, t);
            if ml > tol.zero_rate(h_norm) {
                rec.le("margolus_levitin", FRAC_PI_2 / (ml + tol.rate) - slack, t);
            }
        }
    }

    if let Some((e1, e2)) = two_level_energies {
        let sc = two_level(e1, e2)?;
        let period = 2.0 * std::f64::consts::PI / (e2 - e1).abs();
        for j in 0..100 {
            let tau = period * j as f64 / 100.0;
            let err = (&path.at(tau).matrix().clone() - &sc.analytic_projector(tau)).max_abs();
            rec.le("two_level_closed_form", err, 1e-10);
        }
        for _ in 0..PAIRS {
            let s: f64 = rng.random_range(0.0..period);
            let t: f64 = rng.random_range(0.0..period);
            let diff = path.at(t).matrix() - path.at(s).matrix();
            let ev = hermitian_eigen(&diff)?;
            let expected = sc.analytic_difference_eigenvalues(s, t);
            for (a, b) in ev.eigenvalues().iter().zip(expected) {
                rec.le("two_level_difference_spectrum", (a - b).abs(), 1e-10);
            }
            let angle = maximal_angle(&path.at(s), &path.at(t))?;
            rec.le("two_level_angle_law", (angle - sc.analytic_angle(s, t)).abs(), 1e-9);
        }
    }

    Ok(rec.records)
}

pub fn aggregate(records: impl IntoIterator<Item = Record>) -> Vec<CheckRow> {
    let mut rows: Vec<CheckRow> = Vec::new();
    for r in records {
        let margin = r.lhs - r.rhs;
        let row = match rows.iter_mut().position(|row| row.check == r.check) {
            Some(i) => &mut rows[i],
            None => {
                rows.push(CheckRow { check: r.check, cases: 0, failed: 0, worst_margin: f64::NEG_INFINITY });
                rows.last_mut().expect("just pushed")
            }
        };
        row.cases += 1;
        if !r.passed() {
            row.failed += 1;
        }
        if margin > row.worst_margin || margin.is_nan() {
            row.worst_margin = margin;
        }
    }
    rows
}

pub fn verify(prepared: &Prepared) -> Result<Vec<CheckRow>, CliError> {
    let cfg = &prepared.config;
    let instances = build_instances(cfg, &prepared.base_dir)?;
    let energies = match cfg.scenario {
        ScenarioConfig::TwoLevel { e1, e2 } => Some((e1, e2)),
        _ => None,
    };
    let all = par_map(&instances, cfg.jobs, |index, inst| {
        check_instance(inst, index, cfg, energies).map_err(|e| CliError::numeric(&inst.id, e))
    })?;
    let mut records = Vec::new();
    for r in all {
        records.extend(r?);
    }
    Ok(aggregate(records))
}

pub fn print_table(out: &mut impl Write, rows: &[CheckRow]) -> std::io::Result<()> {
    writeln!(out, "{:<36} {:>7} {:>7} {:>13}  result", "check", "cases", "failed", "worst_margin")?;
    for r in rows {
        let verdict = if r.failed == 0 { "PASS" } else { "FAIL" };
        writeln!(out, "{:<36} {:>7} {:>7} {:>13.3e}  {verdict}", r.check, r.cases, r.failed, r.worst_margin)?;
    }
    let failed = rows.iter().filter(|r| r.failed > 0).count();
    writeln!(out, "{} checks, {} failed", rows.len(), failed)
}
