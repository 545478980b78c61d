//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
//! criterion fails. Tolerances are pinned here and nowhere else.

use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex64;
use szego::experiments::{baby_growth_rate, h1_linear_fit};
use szego::hankel::{eigenvalues, explosion_criterion, gram_k, Verdict, DEFAULT_CLUSTER_TOL, DEFAULT_RANK_CUTOFF_REL};
use szego::solver::{check_lyapunov, evolve, KrasnyMode, SolverConfig};
use szego::symbols::{blaschke, monomial, perturbed_monomial, single_pole, two_poles};
use szego::w::{
    asymptotic_constants, identity_report, integrate_reduced, integrate_w_strided, kappa_fit_report,
    stable_manifold_trajectory_with, w_to_hardy, StableManifoldConfig, WState,
};
use szego::HardyState;

const SLOPE_REL_TOL: f64 = 0.05;
const MOMENTUM_DRIFT_TOL: f64 = 1e-9;
const LYAPUNOV_TOL: f64 = 1e-5;
const L2_CONSERVATION_TOL: f64 = 1e-9;
const SPECTRUM_REL_TOL: f64 = 1e-6;
const CROSS_ORACLE_TOL: f64 = 1e-6;
const KAPPA_REL_TOL: f64 = 0.05;
const IDENTITY_TOL: f64 = 1e-10;
const DECAY_REL_TOL: f64 = 0.01;
const RATIO_REL_TOL: f64 = 0.01;
const ROUND_TRIP_TOL: f64 = 1e-8;
const BABY_L2_BOUND: f64 = 1.0;
const BABY_RATE_TOL: f64 = 1e-10;
const ORDER_RANGE: (f64, f64) = (3.7, 4.3);

type Outcome = Result<(bool, String), String>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// Criteria 1 to 3 share the single-pole run.
struct SinglePoleRun {
    slope: f64,
    target: f64,
    drift: f64,
    lyapunov: f64,
}

fn single_pole_run() -> Result<SinglePoleRun, String> {
    let u0 = single_pole(4096, 0.5);
    let cfg = SolverConfig::new(1.0, 2e-4, 20.0, 4096).with_record_stride(10);
    let (_, series) = evolve(&u0, &cfg).map_err(err)?;
    if let Some(t) = series.resolution_lost_at {
        return Err(format!("single-pole run lost resolution at t = {t}"));
    }
    let k = asymptotic_constants(1.0, u0.momentum()).map_err(err)?;
    Ok(SinglePoleRun {
        slope: h1_linear_fit(&series, 10.0, 20.0).map_err(err)?.slope,
        target: k.growth_coeff(1.0),
        drift: series.momentum_drift(),
        lyapunov: check_lyapunov(&series, 1.0).map_err(err)?,
    })
}

fn h1_slope(run: &Result<SinglePoleRun, String>) -> Outcome {
    let r = run.as_ref().map_err(Clone::clone)?;
    let rel = (r.slope - r.target).abs() / r.target;
    Ok((
        rel <= SLOPE_REL_TOL,
        format!("slope {:.6} vs {:.6}, rel dev {rel:.3e} (tol {SLOPE_REL_TOL})", r.slope, r.target),
    ))
}

fn momentum_drift(run: &Result<SinglePoleRun, String>) -> Outcome {
    let r = run.as_ref().map_err(Clone::clone)?;
    Ok((r.drift <= MOMENTUM_DRIFT_TOL, format!("drift {:.3e} (tol {MOMENTUM_DRIFT_TOL:e})", r.drift)))
}

fn lyapunov(run: &Result<SinglePoleRun, String>) -> Outcome {
    let r = run.as_ref().map_err(Clone::clone)?;
    let u0 = single_pole(1024, 0.5);
    let cfg = SolverConfig::new(0.0, 2e-4, 20.0, 1024).with_record_stride(1000);
    let (_, series) = evolve(&u0, &cfg).map_err(err)?;
    let l0 = series.rows[0].l2_sq;
    let cons = series.rows.iter().map(|row| (row.l2_sq - l0).abs() / l0).fold(0.0, f64::max);
    Ok((
        r.lyapunov <= LYAPUNOV_TOL && cons <= L2_CONSERVATION_TOL,
        format!(
            "residual {:.3e} (tol {LYAPUNOV_TOL:e}); alpha = 0 L2 drift {cons:.3e} (tol {L2_CONSERVATION_TOL:e})",
            r.lyapunov
        ),
    ))
}

fn top_k_squared(u: &HardyState, size: usize, count: usize) -> Result<Vec<f64>, String> {
    let mut e = eigenvalues(&gram_k(u, size).map_err(err)?, 0.0).map_err(err)?;
    e.truncate(count);
    Ok(e)
}

/// Rank-two data: eigenvalues above the rank cutoff must agree relative to
/// their own size; the rest are exact zeros and must stay below the cutoff.
fn spectrum_invariance() -> Outcome {
    let (n, size) = (4096, 768);
    let mut u = two_poles(n, 0.7, 0.8);
    let mut spectra = vec![top_k_squared(&u, size, 5)?];
    for _ in 0..2 {
        let cfg = SolverConfig::new(1.0, 2e-4, 2.5, n).with_record_stride(100_000);
        u = evolve(&u, &cfg).map_err(err)?.0;
        spectra.push(top_k_squared(&u, size, 5)?);
    }
    let cutoff = DEFAULT_RANK_CUTOFF_REL * spectra[0][0];
    let rank = spectra[0].iter().filter(|&&x| x > cutoff).count();
    let mut worst: f64 = 0.0;
    let mut zeros_stay_zero = true;
    for i in 0..spectra.len() {
        for j in i + 1..spectra.len() {
            for (k, (a, b)) in spectra[i].iter().zip(&spectra[j]).enumerate() {
                if k < rank {
                    worst = worst.max((a - b).abs() / a.abs());
                } else {
                    zeros_stay_zero &= a.abs() <= cutoff && b.abs() <= cutoff;
                }
            }
        }
    }
    Ok((
        worst <= SPECTRUM_REL_TOL && zeros_stay_zero,
        format!(
            "top-5 at t = 0: {:?}; rank {rank}, worst rel dev of nonzero eigenvalues {worst:.3e} (tol {SPECTRUM_REL_TOL:e}), \
             remaining {} below cutoff {cutoff:.1e} at all times: {zeros_stay_zero}",
            spectra[0],
            5 - rank
        ),
    ))
}

fn verdicts() -> Outcome {
    let n = 512;
    let pole = explosion_criterion(&single_pole(n, 0.5), 128, DEFAULT_CLUSTER_TOL, None, None).map_err(err)?;
    let bl = explosion_criterion(&blaschke(n, &[c(0.3, 0.0)]), 128, DEFAULT_CLUSTER_TOL, None, None).map_err(err)?;
    let mono = explosion_criterion(&monomial(n, c(1.0, 0.0)), 128, DEFAULT_CLUSTER_TOL, None, None).map_err(err)?;
    let ok = pole.verdict == Verdict::ExplodesStrict
        && bl.verdict == Verdict::ExplodesEqualCase
        && mono.verdict == Verdict::Inconclusive;
    Ok((
        ok,
        format!(
            "single pole {:?} ({:.6} < {:.6}); Blaschke {:?} (F = {:.12}); e^ix {:?}",
            pole.verdict, pole.l2_sq, pole.f_value, bl.verdict, bl.f_value, mono.verdict
        ),
    ))
}

fn cross_oracle() -> Outcome {
    let (n, t_end, dt) = (4096, 5.0, 1e-3);
    let w0 = WState::new(c(0.0, 0.0), c(1.0, 0.0), c(0.5, 0.0)).map_err(err)?;
    let (_, w) = integrate_w_strided(&w0, 1.0, dt, t_end, 1000).map_err(err)?.last();
    let u0 = w_to_hardy(&w0, n).map_err(err)?;
    let (u, _) = evolve(&u0, &SolverConfig::new(1.0, dt, t_end, n).with_record_stride(1000)).map_err(err)?;
    let dist = u.l2_distance(&w_to_hardy(&w, n).map_err(err)?);
    Ok((dist <= CROSS_ORACLE_TOL, format!("l2 distance at t = 5: {dist:.3e} (tol {CROSS_ORACLE_TOL:e})")))
}

fn kappa() -> Outcome {
    let w0 = WState::new(c(0.0, 0.0), c(1.0, 0.0), c(0.5, 0.0)).map_err(err)?;
    let m = w0.momentum();
    let k = asymptotic_constants(1.0, m).map_err(err)?;
    let traj = integrate_reduced(&w0.reduced(), 1.0, m, 1e-3, 500.0, 100).map_err(err)?;
    let r = kappa_fit_report(&traj, &k).map_err(err)?;
    Ok((
        r.rel_dev <= KAPPA_REL_TOL,
        format!(
            "t gamma on [{}, {}]: {:.6} vs kappa {:.6}, rel dev {:.3e} (tol {KAPPA_REL_TOL})",
            r.window[0], r.window[1], r.fitted, r.target, r.rel_dev
        ),
    ))
}

fn identities() -> Outcome {
    let mut worst = (0.0, String::new());
    for alpha in [1.0, 2.0] {
        for m in [1.0, 16.0 / 9.0, 3.0] {
            for check in identity_report(alpha, m, 1.0).map_err(err)?.checks {
                if check.residual > worst.0 || worst.1.is_empty() {
                    worst = (check.residual, format!("{} at alpha {alpha}, M {m:.4}", check.name));
                }
            }
        }
    }
    Ok((worst.0 <= IDENTITY_TOL, format!("worst residual {:.2e} ({}) (tol {IDENTITY_TOL:e})", worst.0, worst.1)))
}

fn stable_manifold() -> Outcome {
    let traj = stable_manifold_trajectory_with(&StableManifoldConfig::new(1.0, 1.0, 1.0)).map_err(err)?;
    let r = traj.report().map_err(err)?;
    let ok = r.decay_rate.rel_dev <= DECAY_REL_TOL
        && r.delta_beta_ratio.rel_dev <= RATIO_REL_TOL
        && r.round_trip_residual <= ROUND_TRIP_TOL;
    Ok((
        ok,
        format!(
            "decay {:.6} vs {:.6} (rel {:.2e}); ratio {:.6} vs {:.6} (rel {:.2e}); round trip {:.2e}",
            r.decay_rate.fitted,
            r.decay_rate.target,
            r.decay_rate.rel_dev,
            r.delta_beta_ratio.fitted,
            r.delta_beta_ratio.target,
            r.delta_beta_ratio.rel_dev,
            r.round_trip_residual
        ),
    ))
}

fn baby_example() -> Outcome {
    let (alpha, n) = (1.0, 1024);
    let u0 = perturbed_monomial(n, 0.05);
    let cfg = SolverConfig::new(alpha, 1e-3, 20.0, n).with_record_stride(10);
    let (_, series) = evolve(&u0, &cfg).map_err(err)?;
    let min_l2 = series.rows.iter().map(|r| r.l2_sq).fold(f64::INFINITY, f64::min);
    let first_below = series.rows.iter().find(|r| r.l2_sq <= BABY_L2_BOUND).map(|r| r.t);
    let resolved_at_crossing = match (first_below, series.resolution_lost_at) {
        (Some(t), Some(lost)) => t < lost,
        (Some(_), None) => true,
        (None, _) => false,
    };
    let k = asymptotic_constants(alpha, u0.momentum()).map_err(err)?;
    let rate = baby_growth_rate(alpha, u0.momentum(), 40.0, 60.0).map_err(err)?;
    let dev = (rate - k.lambda_plus.re).abs();
    Ok((
        min_l2 <= BABY_L2_BOUND && resolved_at_crossing && dev <= BABY_RATE_TOL,
        format!(
            "min L2^2 {min_l2:.6}, first <= 1 at t = {first_below:?}; |q0| rate {rate:.12} vs {:.12} (dev {dev:.1e})",
            k.lambda_plus.re
        ),
    ))
}

fn rk4_order() -> Outcome {
    let (n, t_end) = (512, 1.0);
    let u0 = single_pole(n, 0.5);
    let run = |dt: f64| -> Result<HardyState, String> {
        let cfg = SolverConfig::new(1.0, dt, t_end, n).with_krasny(0.0, KrasnyMode::Absolute).with_record_stride(1_000_000);
        Ok(evolve(&u0, &cfg).map_err(err)?.0)
    };
    let reference = run(0.0025)?;
    let errors = [0.04, 0.02, 0.01]
        .iter()
        .map(|&dt| run(dt).map(|u| u.l2_distance(&reference)))
        .collect::<Result<Vec<_>, _>>()?;
    let orders: Vec<f64> = errors.windows(2).map(|e| (e[0] / e[1]).log2()).collect();
    let ok = orders.iter().all(|p| (ORDER_RANGE.0..=ORDER_RANGE.1).contains(p));
    let shown: Vec<String> = errors.iter().map(|e| format!("{e:.3e}")).collect();
    Ok((ok, format!("errors [{}], observed orders {orders:.3?} (range {ORDER_RANGE:?})", shown.join(", "))))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let single = single_pole_run();
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("single-pole H1 growth slope", Box::new(|| h1_slope(&single))),
        ("momentum conservation", Box::new(|| momentum_drift(&single))),
        ("Lyapunov identity", Box::new(|| lyapunov(&single))),
        ("K^2 spectrum invariance", Box::new(spectrum_invariance)),
        ("explosion criterion verdicts", Box::new(verdicts)),
        ("PDE vs W ODE cross-check", Box::new(cross_oracle)),
        ("kappa asymptotics", Box::new(kappa)),
        ("closed-form identities", Box::new(identities)),
        ("stable manifold", Box::new(stable_manifold)),
        ("perturbed monomial", Box::new(baby_example)),
        ("RK4 order of accuracy", Box::new(rk4_order)),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let (pass, detail) = run().unwrap_or_else(|e| (false, format!("error: {e}")));
        if !pass {
            failed += 1;
        }
        println!("{} {:>2} {name}: {detail}", if pass { "PASS" } else { "FAIL" }, i + 1);
    }
    println!(
        "acceptance: {} passed, {failed} failed ({:.0} s)",
        criteria.len() - failed,
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
