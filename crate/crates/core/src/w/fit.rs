use serde::Serialize;

use super::constants::AsymptoticConstants;
use super::system::{ReducedTrajectory, WTrajectory};
use crate::error::{Error, Result};

/// Minimum number of samples inside a fit window.
pub const MIN_FIT_POINTS: usize = 3;

/// A fitted constant compared against its closed-form target.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FitReport {
    pub target: f64,
    pub fitted: f64,
    pub rel_dev: f64,
    pub window: [f64; 2],
}

impl FitReport {
    pub fn new(target: f64, fitted: f64, window: [f64; 2]) -> Self {
        Self {
            target,
            fitted,
            rel_dev: (fitted - target).abs() / target.abs(),
            window,
        }
    }

    pub fn within(&self, rel_tol: f64) -> bool {
        self.rel_dev <= rel_tol
    }
}

/// Ordinary least squares `y = slope x + intercept`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::Fit(format!("need at least 2 paired samples, got {}", x.len().min(y.len()))));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my) * (v - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Fit("abscissae are all equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = x.iter().zip(y).map(|(a, b)| (b - slope * a - intercept).powi(2)).sum();
    let r_squared = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    Ok(LinearFit {
        slope,
        intercept,
        r_squared,
    })
}

/// Indices with `lo <= t <= hi`.
pub fn window_indices(times: &[f64], lo: f64, hi: f64) -> Vec<usize> {
    (0..times.len()).filter(|&i| times[i] >= lo && times[i] <= hi).collect()
}

/// Fits `gamma(t) ~ kappa / t` on `[lo, hi]` by least squares of the constant
/// `t gamma(t)`.
pub fn gamma_tail_fit_window(times: &[f64], gammas: &[f64], lo: f64, hi: f64) -> Result<f64> {
    let idx = window_indices(times, lo.max(f64::MIN_POSITIVE), hi);
    if idx.len() < MIN_FIT_POINTS {
        return Err(Error::Fit(format!(
            "window [{lo}, {hi}] holds {} samples, need {MIN_FIT_POINTS}",
            idx.len()
        )));
    }
    let first = gammas[idx[0]];
    let last = gammas[*idx.last().unwrap()];
    let t_ratio = times[idx[0]] / times[*idx.last().unwrap()];
    // A 1/t profile shrinks by t_ratio across the window.
    if !(last > 0.0) || last / first > 0.5 * (1.0 + t_ratio) {
        return Err(Error::Fit(format!(
            "gamma does not decay on [{lo}, {hi}]: {first} -> {last}"
        )));
    }
    Ok(idx.iter().map(|&i| times[i] * gammas[i]).sum::<f64>() / idx.len() as f64)
}

/// [`gamma_tail_fit_window`] on `[t_end / 2, t_end]`.
pub fn gamma_tail_fit(times: &[f64], gammas: &[f64]) -> Result<f64> {
    let t_end = *times.last().ok_or_else(|| Error::Fit("empty trajectory".into()))?;
    gamma_tail_fit_window(times, gammas, t_end / 2.0, t_end)
}

/// Fitted `lim t gamma(t)` of a reduced run against `kappa`.
pub fn kappa_fit_report(traj: &ReducedTrajectory, constants: &AsymptoticConstants) -> Result<FitReport> {
    let t_end = *traj.times.last().ok_or_else(|| Error::Fit("empty trajectory".into()))?;
    let fitted = gamma_tail_fit(&traj.times, &traj.gammas())?;
    Ok(FitReport::new(constants.kappa, fitted, [t_end / 2.0, t_end]))
}

/// Log-log fit of `||u(t)||^2_{H^s}` against `c^2(s) t^{2s - 1}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GrowthReport {
    pub s: f64,
    pub slope: FitReport,
    /// Prefactor with the exponent pinned at `2s - 1`.
    pub prefactor: FitReport,
}

/// Fits slope and prefactor of `log ||u(t)||^2_{H^s}` against `log t` over the
/// last decade of recorded times.
pub fn growth_fit(times: &[f64], hs: &[f64], s: f64, target_prefactor: f64) -> Result<GrowthReport> {
    let t_end = *times.last().ok_or_else(|| Error::Fit("empty trajectory".into()))?;
    let lo = t_end / 10.0;
    let idx = window_indices(times, lo.max(f64::MIN_POSITIVE), t_end);
    if idx.len() < MIN_FIT_POINTS {
        return Err(Error::Fit(format!("last decade holds {} samples", idx.len())));
    }
    let lx: Vec<f64> = idx.iter().map(|&i| times[i].ln()).collect();
    let ly: Vec<f64> = idx.iter().map(|&i| hs[i].ln()).collect();
    let fit = linear_fit(&lx, &ly)?;
    let exponent = 2.0 * s - 1.0;
    let log_pref = lx.iter().zip(&ly).map(|(x, y)| y - exponent * x).sum::<f64>() / lx.len() as f64;
    let window = [times[idx[0]], t_end];
    Ok(GrowthReport {
        s,
        slope: FitReport::new(exponent, fit.slope, window),
        prefactor: FitReport::new(target_prefactor, log_pref.exp(), window),
    })
}

/// Checks a `W` run against `||u(t)||^2_{H^s} ~ c^2(s, alpha, M) t^{2s-1}`,
/// with the norm summed in closed form over the geometric coefficients.
pub fn wbis_endstate_check(traj: &WTrajectory, constants: &AsymptoticConstants, s: f64) -> Result<GrowthReport> {
    // Refuse runs whose gap 1 - |p|^2 is not closing.
    gamma_tail_fit(&traj.times, &traj.gammas())?;
    let hs: Vec<f64> = traj.states.iter().map(|w| w.hs_norm_sq(s)).collect();
    growth_fit(&traj.times, &hs, s, constants.growth_coeff(s))
}

/// Long-time behaviour of a `W` run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Dichotomy {
    /// `|p|` stays away from 1 and `||u||^2 >= M`.
    Bounded,
    /// `1 - |p|^2` decreases monotonically toward 0 over the second half.
    Exploding,
    Undetermined,
}

/// Classifies a `W` run from the second half of its samples.
pub fn classify_w_run(traj: &WTrajectory) -> Dichotomy {
    let n = traj.states.len();
    if n < 4 {
        return Dichotomy::Undetermined;
    }
    let tail = &traj.states[n / 2..];
    let gaps: Vec<f64> = tail.iter().map(|w| w.gap()).collect();
    let monotone = gaps.windows(2).all(|g| g[1] <= g[0] * (1.0 + 1e-12));
    let first = gaps[0];
    let last = *gaps.last().unwrap();
    if monotone && last < 0.75 * first {
        return Dichotomy::Exploding;
    }
    let m = traj.states[0].momentum();
    let l2 = tail.last().unwrap().l2_norm_sq();
    let max_gap = gaps.iter().copied().fold(0.0, f64::max);
    if last >= 0.5 * max_gap && l2 >= m * (1.0 - 1e-9) {
        return Dichotomy::Bounded;
    }
    Dichotomy::Undetermined
}

#[cfg(test)]
mod tests {
    use num_complex::Complex64;

    use super::super::constants::asymptotic_constants;
    use super::super::system::{integrate_w_strided, WState};
    use super::*;

    fn cx(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn linear_fit_of_exact_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y: Vec<f64> = x.iter().map(|v| 2.5 * v - 1.0).collect();
        let f = linear_fit(&x, &y).unwrap();
        assert!((f.slope - 2.5).abs() < 1e-14 && (f.intercept + 1.0).abs() < 1e-14);
        assert!((f.r_squared - 1.0).abs() < 1e-14);
        assert!(linear_fit(&[1.0, 1.0], &[0.0, 1.0]).is_err());
    }

    #[test]
    fn exact_inverse_t_profile() {
        let kappa = 1.1715;
        let times: Vec<f64> = (1..=1000).map(|i| i as f64 * 0.5).collect();
        let gammas: Vec<f64> = times.iter().map(|t| kappa / t).collect();
        assert!((gamma_tail_fit(&times, &gammas).unwrap() - kappa).abs() < 1e-12);
    }

    #[test]
    fn constant_gamma_is_rejected() {
        let times: Vec<f64> = (0..100).map(|i| i as f64).collect();
        let gammas = vec![16.0 / 9.0; 100];
        assert!(matches!(gamma_tail_fit(&times, &gammas), Err(Error::Fit(_))));
    }

    #[test]
    fn short_window_is_rejected() {
        assert!(gamma_tail_fit(&[1.0, 2.0], &[1.0, 0.5]).is_err());
    }

    #[test]
    fn planted_growth_profile() {
        // Exact power law: the fit recovers both constants.
        let c2 = 5.4020;
        let times: Vec<f64> = (1..=2000).map(|i| i as f64 * 0.01).collect();
        let hs: Vec<f64> = times.iter().map(|t| c2 * t).collect();
        let r = growth_fit(&times, &hs, 1.0, c2).unwrap();
        assert!(r.slope.rel_dev < 1e-12 && r.prefactor.rel_dev < 1e-12);
        assert_eq!(r.slope.window, [2.0, 20.0]);
    }

    #[test]
    fn planted_w_trajectory_growth() {
        // p(t) real with M (1 - p^2) = kappa / t exactly and M held fixed.
        let k = asymptotic_constants(1.0, 16.0 / 9.0).unwrap();
        let m = k.momentum;
        let mut traj = WTrajectory {
            alpha: 1.0,
            times: Vec::new(),
            states: Vec::new(),
            near_boundary_at: None,
        };
        for i in 1..=400 {
            let t = 50.0 * i as f64;
            let gap = k.kappa / (m * t);
            let p = (1.0 - gap).sqrt();
            let c = (m).sqrt() * gap;
            traj.times.push(t);
            traj.states.push(WState::new(cx(0.0, 0.0), cx(c, 0.0), cx(p, 0.0)).unwrap());
        }
        let r = wbis_endstate_check(&traj, &k, 1.0).unwrap();
        assert!(r.slope.rel_dev < 1e-3, "{r:?}");
        assert!(r.prefactor.rel_dev < 1e-3, "{r:?}");
    }

    #[test]
    fn circle_run_is_not_exploding() {
        let w0 = WState::new(cx(0.0, 0.0), cx(1.0, 0.0), cx(0.0, 0.0)).unwrap();
        let traj = integrate_w_strided(&w0, 1.0, 1e-3, 10.0, 100).unwrap();
        let k = asymptotic_constants(1.0, 1.0).unwrap();
        assert!(matches!(wbis_endstate_check(&traj, &k, 1.0), Err(Error::Fit(_))));
        assert_eq!(classify_w_run(&traj), Dichotomy::Bounded);
    }

    #[test]
    fn classification_is_stable_under_refinement() {
        let w0 = WState::new(cx(0.0, 0.0), cx(1.0, 0.0), cx(0.5, 0.0)).unwrap();
        let coarse = integrate_w_strided(&w0, 1.0, 2e-3, 20.0, 50).unwrap();
        let fine = integrate_w_strided(&w0, 1.0, 1e-3, 20.0, 100).unwrap();
        assert_eq!(classify_w_run(&coarse), Dichotomy::Exploding);
        assert_eq!(classify_w_run(&fine), Dichotomy::Exploding);
    }
}
