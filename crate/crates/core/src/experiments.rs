//! Preset experiments and the commands behind the `szego` binary.
//!
//! Every run writes its artifacts into the configured output directory and
//! returns a [`RunSummary`] whose `pass` flag is the conjunction of the
//! preset's checks.

use std::fs;
use std::path::Path;
use std::time::Instant;

use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{ExperimentConfig, Preset};
use crate::error::Result;
use crate::hankel::{criterion_from_spectrum, k_spectrum, CriterionVerdict, KSpectrum, SpectrumSummary, Verdict};
use crate::hardy::HardyState;
use crate::io::{write_artifact, write_json};
use crate::solver::{check_lyapunov, evolve, DiagnosticsSeries};
use crate::w::{
    asymptotic_constants, classify_w_run, identity_report, integrate_reduced, integrate_w_strided, kappa_fit_report,
    linear_fit, linearized_q0, stable_manifold_trajectory_with, wbis_endstate_check, window_indices, Dichotomy,
    FitReport, IdentityReport, LinearFit, StableManifoldConfig,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    AtMost,
    AtLeast,
    /// `value` is 1 when the condition holds.
    Holds,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub relation: Relation,
    pub pass: bool,
}

impl Check {
    pub fn at_most(name: &str, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            threshold,
            relation: Relation::AtMost,
            pass: value <= threshold,
        }
    }

    pub fn at_least(name: &str, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            threshold,
            relation: Relation::AtLeast,
            pass: value >= threshold,
        }
    }

    pub fn holds(name: &str, ok: bool) -> Self {
        Self {
            name: name.into(),
            value: if ok { 1.0 } else { 0.0 },
            threshold: 1.0,
            relation: Relation::Holds,
            pass: ok,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunSummary {
    pub preset: Preset,
    pub pass: bool,
    pub checks: Vec<Check>,
    pub artifacts: Vec<String>,
}

impl RunSummary {
    fn new(preset: Preset, checks: Vec<Check>, mut artifacts: Vec<String>) -> Self {
        artifacts.push("summary.json".into());
        artifacts.push("meta.json".into());
        Self {
            preset,
            pass: checks.iter().all(|c| c.pass),
            checks,
            artifacts,
        }
    }

    /// One line per check, `PASS` or `FAIL` first.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let rel = match c.relation {
                Relation::AtMost => "<=",
                Relation::AtLeast => ">=",
                Relation::Holds => "==",
            };
            out.push_str(&format!(
                "{} {}/{}: {:.6e} {} {:.6e}\n",
                if c.pass { "PASS" } else { "FAIL" },
                self.preset,
                c.name,
                c.value,
                rel,
                c.threshold
            ));
        }
        out
    }
}

/// Gram size actually used: the configured size, capped by the stored modes.
fn gram_size(cfg: &ExperimentConfig, u: &HardyState) -> usize {
    cfg.spectrum.size.min(u.modes())
}

fn spectrum_of(cfg: &ExperimentConfig, u: &HardyState) -> Result<KSpectrum> {
    k_spectrum(u, gram_size(cfg, u), cfg.spectrum.cluster_tol, cfg.spectrum.rank_cutoff)
}

/// Least-squares line through `||u(t)||^2_{H^1}` on `[lo, hi]`.
pub fn h1_linear_fit(series: &DiagnosticsSeries, lo: f64, hi: f64) -> Result<LinearFit> {
    let t = series.times();
    let h = series.hs_column(0);
    let idx = window_indices(&t, lo, hi);
    let x: Vec<f64> = idx.iter().map(|&i| t[i]).collect();
    let y: Vec<f64> = idx.iter().map(|&i| h[i]).collect();
    linear_fit(&x, &y)
}

/// Growth rate of `|q(t)|` for the linearized baby example, measured on
/// `[t1, t2]` from the closed form.
pub fn baby_growth_rate(alpha: f64, momentum: f64, t1: f64, t2: f64) -> Result<f64> {
    let q0 = Complex64::new(1.0, 0.0);
    let dq0 = Complex64::new(-alpha, -1.0);
    let a = linearized_q0(alpha, momentum, q0, dq0, t1)?.norm().ln();
    let b = linearized_q0(alpha, momentum, q0, dq0, t2)?.norm().ln();
    Ok((b - a) / (t2 - t1))
}

fn run_pde(cfg: &ExperimentConfig, dir: &Path) -> Result<(Vec<Check>, Vec<String>)> {
    let tol = &cfg.tolerances;
    let u0 = cfg.initial.build(cfg.solver.grid_size)?;
    let spec = spectrum_of(cfg, &u0)?;
    let verdict = criterion_from_spectrum(&u0, &spec, None);
    let (_, series) = evolve(&u0, &cfg.solver)?;

    write_artifact(dir, "diagnostics.csv", &series.to_csv_string())?;
    write_artifact(dir, "spectrum.csv", &spec.to_csv_string())?;
    write_json(dir, "verdict.json", &verdict)?;

    let t_end = series.rows.last().map_or(0.0, |r| r.t);
    let window = [t_end / 2.0, t_end];
    let line = h1_linear_fit(&series, window[0], window[1])?;
    let drift = series.momentum_drift();
    let lyapunov = check_lyapunov(&series, cfg.solver.alpha)?;
    let min_l2 = series.rows.iter().map(|r| r.l2_sq).fold(f64::INFINITY, f64::min);

    let mut checks = vec![
        Check::at_most("momentum_drift", drift, tol.momentum_drift),
        Check::holds("resolved", series.resolution_lost_at.is_none()),
    ];
    let mut fit = json!({
        "h1_linear": { "slope": line.slope, "intercept": line.intercept, "r_squared": line.r_squared, "window": window },
        "momentum_drift": drift,
        "lyapunov_residual": lyapunov,
        "min_l2_sq": min_l2,
        "resolution_lost_at": series.resolution_lost_at,
        "rank": spec.rank(),
    });
    match cfg.preset {
        Preset::SinglePole => {
            let k = asymptotic_constants(cfg.solver.alpha, u0.momentum())?;
            let growth = FitReport::new(k.growth_coeff(1.0), line.slope, window);
            fit["h1_growth"] = serde_json::to_value(growth)?;
            checks.push(Check::at_most("h1_slope_rel_dev", growth.rel_dev, tol.slope_rel));
            checks.push(Check::at_most("lyapunov_residual", lyapunov, tol.lyapunov));
            checks.push(Check::holds("verdict_explodes_strict", verdict.verdict == Verdict::ExplodesStrict));
        }
        Preset::TwoPoles => {
            checks.push(Check::holds("k_rank_two", spec.rank() == 2));
            checks.push(Check::at_least("h1_slope", line.slope, 0.0));
            checks.push(Check::at_least("h1_r_squared", line.r_squared, tol.r_squared));
        }
        Preset::Gaussian => {
            checks.push(Check::at_least("h1_slope", line.slope, 0.0));
            checks.push(Check::at_least("h1_r_squared", line.r_squared, tol.r_squared));
        }
        Preset::Baby => {
            let k = asymptotic_constants(cfg.solver.alpha, u0.momentum())?;
            let rate = baby_growth_rate(cfg.solver.alpha, u0.momentum(), 40.0, 60.0)?;
            fit["q0_growth_rate"] = json!({ "closed_form": rate, "target": k.lambda_plus.re });
            checks.push(Check::at_most("min_l2_sq", min_l2, 1.0));
            checks.push(Check::at_most(
                "q0_growth_rate_abs_dev",
                (rate - k.lambda_plus.re).abs(),
                tol.closed_form,
            ));
            checks.push(Check::at_most("lyapunov_residual", lyapunov, tol.lyapunov));
        }
        _ => checks.push(Check::at_most("lyapunov_residual", lyapunov, tol.lyapunov)),
    }
    write_json(dir, "fit.json", &fit)?;
    let artifacts = ["diagnostics.csv", "spectrum.csv", "verdict.json", "fit.json"];
    Ok((checks, artifacts.iter().map(|s| s.to_string()).collect()))
}

fn run_kappa(cfg: &ExperimentConfig, dir: &Path) -> Result<(Vec<Check>, Vec<String>)> {
    let w0 = cfg.initial.w_state()?;
    let m = w0.momentum();
    let k = asymptotic_constants(cfg.solver.alpha, m)?;
    let traj = integrate_reduced(&w0.reduced(), cfg.solver.alpha, m, cfg.ode_dt, cfg.solver.t_end, cfg.solver.record_stride)?;
    write_artifact(dir, "trajectory.csv", &traj.to_csv_string())?;
    let report = kappa_fit_report(&traj, &k)?;
    write_json(dir, "fit.json", &report)?;
    let checks = vec![
        Check::at_most("kappa_rel_dev", report.rel_dev, cfg.tolerances.kappa_rel),
        Check::at_most("constraint_residual", traj.max_constraint_residual(), 1e-8 * m.powi(3)),
    ];
    Ok((checks, vec!["trajectory.csv".into(), "fit.json".into()]))
}

fn stable_config(cfg: &ExperimentConfig) -> StableManifoldConfig {
    let mut sm = StableManifoldConfig::new(cfg.beta_inf, cfg.solver.alpha, cfg.momentum);
    sm.t_start = cfg.t_start;
    sm.t_end_back = cfg.t_end_back;
    sm.dt = cfg.ode_dt;
    sm
}

fn run_stable(cfg: &ExperimentConfig, dir: &Path) -> Result<(Vec<Check>, Vec<String>)> {
    let traj = stable_manifold_trajectory_with(&stable_config(cfg))?;
    write_artifact(dir, "stable_manifold.csv", &traj.to_csv_string())?;
    let report = traj.report()?;
    write_json(dir, "fit.json", &report)?;
    let tol = &cfg.tolerances;
    let checks = vec![
        Check::at_most("decay_rate_rel_dev", report.decay_rate.rel_dev, tol.decay_rel),
        Check::at_most("delta_beta_ratio_rel_dev", report.delta_beta_ratio.rel_dev, tol.ratio_rel),
        Check::at_most("round_trip_residual", report.round_trip_residual, tol.round_trip),
    ];
    Ok((checks, vec!["stable_manifold.csv".into(), "fit.json".into()]))
}

/// Runs the configured preset, writing its artifacts, `summary.json` and
/// `meta.json` into `cfg.output_dir`.
pub fn run_preset(cfg: &ExperimentConfig) -> Result<RunSummary> {
    cfg.validate()?;
    let dir = cfg.output_dir.as_path();
    fs::create_dir_all(dir)?;
    let start = Instant::now();
    let (checks, artifacts) = match cfg.preset {
        Preset::KappaFit => run_kappa(cfg, dir)?,
        Preset::StableManifold => run_stable(cfg, dir)?,
        _ => run_pde(cfg, dir)?,
    };
    let summary = RunSummary::new(cfg.preset, checks, artifacts);
    write_json(dir, "summary.json", &summary)?;
    write_meta(dir, cfg, start)?;
    Ok(summary)
}

/// Config echo and versions; the only artifact with wall-clock content.
fn write_meta(dir: &Path, cfg: &ExperimentConfig, start: Instant) -> Result<()> {
    let meta = json!({
        "config": cfg,
        "package": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "elapsed_seconds": start.elapsed().as_secs_f64(),
    });
    write_json(dir, "meta.json", &meta)
}

/// Explosion verdict of the configured initial condition.
pub fn run_criterion(cfg: &ExperimentConfig) -> Result<CriterionVerdict> {
    let u0 = cfg.initial.build(cfg.solver.grid_size)?;
    let spec = spectrum_of(cfg, &u0)?;
    Ok(criterion_from_spectrum(&u0, &spec, None))
}

/// Clustered spectrum of `K_u^2` with its summary.
pub fn run_spectrum(cfg: &ExperimentConfig) -> Result<(KSpectrum, SpectrumSummary)> {
    let u0 = cfg.initial.build(cfg.solver.grid_size)?;
    let spec = spectrum_of(cfg, &u0)?;
    let summary = SpectrumSummary::from(&criterion_from_spectrum(&u0, &spec, None));
    Ok((spec, summary))
}

#[derive(Clone, Debug, Serialize)]
pub struct WodeSummary {
    pub momentum: f64,
    pub momentum_drift: f64,
    pub classification: Dichotomy,
    pub near_boundary_at: Option<f64>,
    pub min_l2_sq: f64,
    /// Log-log growth fit, present for exploding runs.
    pub growth: Option<Value>,
    pub kappa: Option<FitReport>,
}

/// Integrates the `(b, c, p)` system from the configured `W` state, writing
/// `trajectory.csv` and `fit.json`.
pub fn run_wode(cfg: &ExperimentConfig) -> Result<WodeSummary> {
    let w0 = cfg.initial.w_state()?;
    let dir = cfg.output_dir.as_path();
    fs::create_dir_all(dir)?;
    let traj = integrate_w_strided(&w0, cfg.solver.alpha, cfg.ode_dt, cfg.solver.t_end, cfg.solver.record_stride)?;
    write_artifact(dir, "trajectory.csv", &traj.to_csv_string())?;
    let m = w0.momentum();
    let classification = classify_w_run(&traj);
    let (growth, kappa) = if classification == Dichotomy::Exploding {
        let k = asymptotic_constants(cfg.solver.alpha, m)?;
        let g = wbis_endstate_check(&traj, &k, cfg.s).ok();
        let t_end = *traj.times.last().unwrap();
        let kf = crate::w::gamma_tail_fit(&traj.times, &traj.gammas())
            .ok()
            .map(|f| FitReport::new(k.kappa, f, [t_end / 2.0, t_end]));
        (g.map(serde_json::to_value).transpose()?, kf)
    } else {
        (None, None)
    };
    let summary = WodeSummary {
        momentum: m,
        momentum_drift: traj.momentum_drift(),
        classification,
        near_boundary_at: traj.near_boundary_at,
        min_l2_sq: traj.states.iter().map(|w| w.l2_norm_sq()).fold(f64::INFINITY, f64::min),
        growth,
        kappa,
    };
    write_json(dir, "fit.json", &summary)?;
    Ok(summary)
}

/// Builds a stable-manifold trajectory, writing `stable_manifold.csv` and
/// `fit.json`.
pub fn run_stable_manifold(cfg: &ExperimentConfig) -> Result<RunSummary> {
    let dir = cfg.output_dir.as_path();
    fs::create_dir_all(dir)?;
    let start = Instant::now();
    let (checks, artifacts) = run_stable(cfg, dir)?;
    let summary = RunSummary::new(Preset::StableManifold, checks, artifacts);
    write_json(dir, "summary.json", &summary)?;
    write_meta(dir, cfg, start)?;
    Ok(summary)
}

/// Residuals of every closed-form identity at `(alpha, M)`.
pub fn run_verify(alpha: f64, momentum: f64, s: f64) -> Result<IdentityReport> {
    identity_report(alpha, momentum, s)
}
