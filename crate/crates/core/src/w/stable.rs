//! Trajectories converging to the circle orbit, built from their prescribed
//! asymptotics `beta(t) ~ beta_inf e^{-(a + alpha) t}`.
//!
//! In the variables `X = (beta, delta, Re zeta, Im zeta)` the reduced system
//! reads `X' + A X = Q(X)` with `Q` quadratic and cubic. The decaying solution
//! tangent to the `alpha + a` eigenvector `X_inf` solves
//!
//! ```text
//! X(t) = e^{-tA} X_inf - int_t^inf e^{(s - t) A} Q(X(s)) ds
//! ```
//!
//! which is iterated on a uniform grid starting at `T_start`, with the
//! integral evaluated by a backward Simpson recursion. The solution is then
//! continued backward in time with RK4.

use std::io::Write;

use nalgebra::{Matrix4, Vector4};
use serde::Serialize;

use super::constants::{asymptotic_constants, linearization_matrix, AsymptoticConstants};
use super::fit::{linear_fit, window_indices, FitReport, MIN_FIT_POINTS};
use super::system::{delta_field, rk4, step_count, DeltaState};
use crate::error::{Error, Result};
use crate::io::fmt_f64;

/// Settings of [`stable_manifold_trajectory_with`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StableManifoldConfig {
    pub beta_inf: f64,
    pub alpha: f64,
    pub momentum: f64,
    /// Start of the fixed-point interval; `None` picks
    /// `beta_inf e^{-(a + alpha) T_start} = 1e-6 M`.
    pub t_start: Option<f64>,
    /// End of the backward continuation; `None` means `T_start / 2`.
    pub t_end_back: Option<f64>,
    /// Grid step of the fixed-point iteration.
    pub grid_step: f64,
    /// Length of the fixed-point interval in units of `1 / (a + alpha)`.
    pub horizon_decays: f64,
    /// RK4 step of the backward continuation.
    pub dt: f64,
    /// Stopping threshold on the change of `sup_t e^{(a + alpha) t} |X(t)| / beta_inf`.
    pub tol: f64,
    pub max_iter: usize,
}

impl StableManifoldConfig {
    pub fn new(beta_inf: f64, alpha: f64, momentum: f64) -> Self {
        Self {
            beta_inf,
            alpha,
            momentum,
            t_start: None,
            t_end_back: None,
            grid_step: 1e-3,
            horizon_decays: 40.0,
            dt: 1e-3,
            tol: 1e-12,
            max_iter: 200,
        }
    }
}

/// `T_start` with `beta_inf e^{-(a + alpha) T_start} = 1e-6 M`.
pub fn default_t_start(beta_inf: f64, constants: &AsymptoticConstants) -> f64 {
    (beta_inf / (1e-6 * constants.momentum)).ln().max(0.0) / constants.decay_rate
}

/// Leading eigenvector `X_inf` of `A` for the eigenvalue `alpha + a`,
/// normalised to `beta = beta_inf`.
pub fn leading_direction(beta_inf: f64, constants: &AsymptoticConstants) -> Vector4<f64> {
    let (a, al, m) = (constants.a, constants.alpha, constants.momentum);
    beta_inf * Vector4::new(1.0, (a - al) / (a + al), m * (al - a) / a, (al - a) / 2.0)
}

/// Nonlinear part `Q(X)` of `X' + A X = Q(X)`.
pub fn nonlinearity(x: &Vector4<f64>, momentum: f64) -> Vector4<f64> {
    let (beta, delta, zr, zi) = (x[0], x[1], x[2], x[3]);
    let m = momentum;
    let s = beta + 3.0 * delta;
    Vector4::new(
        0.0,
        0.0,
        s * zi,
        -s * zr - 2.0 * m * delta * delta - 4.0 * m * beta * delta + delta.powi(3) + 3.0 * beta * delta * delta,
    )
}

#[derive(Clone, Debug)]
pub struct StableManifoldTrajectory {
    pub config: StableManifoldConfig,
    pub constants: AsymptoticConstants,
    pub t_start: f64,
    pub t_end_back: f64,
    /// Increasing times covering `[t_end_back, T_start + horizon]`.
    pub times: Vec<f64>,
    pub states: Vec<DeltaState>,
    /// `X(T_start)` from the fixed point.
    pub seed: DeltaState,
    pub iterations: usize,
    pub final_change: f64,
    /// `|X_forward(T_start) - X(T_start)|_inf / |X(T_start)|_inf` after
    /// re-integrating forward from the backward endpoint.
    pub round_trip_residual: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct StableManifoldReport {
    pub decay_rate: FitReport,
    pub delta_beta_ratio: FitReport,
    pub round_trip_residual: f64,
    pub iterations: usize,
    pub t_start: f64,
}

impl StableManifoldTrajectory {
    /// Rate `r` of a least-squares fit `log beta ~ -r t` on `[lo, hi]`.
    pub fn decay_rate_fit(&self, lo: f64, hi: f64) -> Result<FitReport> {
        let idx = window_indices(&self.times, lo, hi);
        if idx.len() < MIN_FIT_POINTS {
            return Err(Error::Fit(format!("window [{lo}, {hi}] holds {} samples", idx.len())));
        }
        let t: Vec<f64> = idx.iter().map(|&i| self.times[i]).collect();
        let lb: Vec<f64> = idx.iter().map(|&i| self.states[i].beta.ln()).collect();
        let f = linear_fit(&t, &lb)?;
        Ok(FitReport::new(self.constants.decay_rate, -f.slope, [lo, hi]))
    }

    /// `delta / beta` at `T_start` against `(a - alpha) / (a + alpha)`.
    pub fn ratio_report(&self) -> FitReport {
        let k = &self.constants;
        FitReport::new(
            (k.a - k.alpha) / (k.a + k.alpha),
            self.seed.delta / self.seed.beta,
            [self.t_start, self.t_start],
        )
    }

    pub fn report(&self) -> Result<StableManifoldReport> {
        Ok(StableManifoldReport {
            decay_rate: self.decay_rate_fit(self.t_end_back, self.t_start)?,
            delta_beta_ratio: self.ratio_report(),
            round_trip_residual: self.round_trip_residual,
            iterations: self.iterations,
            t_start: self.t_start,
        })
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "t,beta,delta,re_zeta,im_zeta")?;
        for (t, d) in self.times.iter().zip(&self.states) {
            let fields = [*t, d.beta, d.delta, d.zeta.re, d.zeta.im];
            let line: Vec<String> = fields.iter().map(|&x| fmt_f64(x)).collect();
            writeln!(out, "{}", line.join(","))?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("CSV is ASCII")
    }
}

/// [`stable_manifold_trajectory_with`] at default grid and tolerances.
pub fn stable_manifold_trajectory(
    beta_inf: f64,
    alpha: f64,
    momentum: f64,
    t_start: Option<f64>,
    t_end_back: Option<f64>,
) -> Result<StableManifoldTrajectory> {
    let mut cfg = StableManifoldConfig::new(beta_inf, alpha, momentum);
    cfg.t_start = t_start;
    cfg.t_end_back = t_end_back;
    stable_manifold_trajectory_with(&cfg)
}

struct FixedPoint {
    times: Vec<f64>,
    states: Vec<Vector4<f64>>,
    iterations: usize,
    change: f64,
}

fn solve_fixed_point(cfg: &StableManifoldConfig, k: &AsymptoticConstants, t0: f64) -> Result<FixedPoint> {
    let r = k.decay_rate;
    let h = cfg.grid_step;
    let mut j_max = (cfg.horizon_decays / r / h).ceil() as usize;
    j_max += j_max % 2;
    let times: Vec<f64> = (0..=j_max).map(|j| t0 + j as f64 * h).collect();
    let x_inf = leading_direction(cfg.beta_inf, k);
    let free: Vec<Vector4<f64>> = times.iter().map(|t| x_inf * (-r * t).exp()).collect();
    let weights: Vec<f64> = times.iter().map(|t| (r * t).exp()).collect();

    let a = linearization_matrix(cfg.alpha, cfg.momentum).matrix;
    let e1: Matrix4<f64> = (a * h).exp();
    let e2 = e1 * e1;

    let mut x = free.clone();
    let mut integral = vec![Vector4::zeros(); j_max + 1];
    for iter in 1..=cfg.max_iter {
        let q: Vec<Vector4<f64>> = x.iter().map(|v| nonlinearity(v, cfg.momentum)).collect();
        // I_j = int_{t_j}^{t_J} e^{(s - t_j) A} Q ds; the tail past t_J is
        // below roundoff relative to X(t_j).
        integral[j_max] = Vector4::zeros();
        integral[j_max - 1] = (q[j_max - 1] + e1 * q[j_max]) * (h / 2.0);
        for j in (0..j_max - 1).rev() {
            integral[j] = e2 * integral[j + 2] + (q[j] + e1 * q[j + 1] * 4.0 + e2 * q[j + 2]) * (h / 3.0);
        }
        let mut change: f64 = 0.0;
        for j in 0..=j_max {
            let next = free[j] - integral[j];
            change = change.max(weights[j] * (next - x[j]).amax() / cfg.beta_inf);
            x[j] = next;
        }
        if !change.is_finite() || change > 1e6 {
            return Err(Error::FixedPointDivergence {
                iterations: iter,
                change,
            });
        }
        if change < cfg.tol {
            return Ok(FixedPoint {
                times,
                states: x,
                iterations: iter,
                change,
            });
        }
        if iter == cfg.max_iter {
            return Err(Error::FixedPointDivergence {
                iterations: iter,
                change,
            });
        }
    }
    unreachable!("loop returns on its last iteration")
}

fn integrate_delta(x0: [f64; 4], alpha: f64, m: f64, dt: f64, steps: usize, mut record: impl FnMut([f64; 4])) -> Result<[f64; 4]> {
    let mut x = x0;
    for _ in 0..steps {
        x = rk4(&x, dt, |y| delta_field(y, alpha, m));
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::BlowUp { t: f64::NAN });
        }
        record(x);
    }
    Ok(x)
}

pub fn stable_manifold_trajectory_with(cfg: &StableManifoldConfig) -> Result<StableManifoldTrajectory> {
    if !(cfg.beta_inf > 0.0 && cfg.beta_inf.is_finite()) {
        return Err(Error::Domain(format!("beta_inf must be positive, got {}", cfg.beta_inf)));
    }
    if !(cfg.grid_step > 0.0 && cfg.horizon_decays > 0.0) {
        return Err(Error::Domain("grid step and horizon must be positive".into()));
    }
    let k = asymptotic_constants(cfg.alpha, cfg.momentum)?;
    let t0 = cfg.t_start.unwrap_or_else(|| default_t_start(cfg.beta_inf, &k));
    let t_back = cfg.t_end_back.unwrap_or(t0 / 2.0);
    if !(t_back <= t0) {
        return Err(Error::Domain(format!("t_end_back = {t_back} exceeds T_start = {t0}")));
    }
    let fp = solve_fixed_point(cfg, &k, t0)?;
    let seed = fp.states[0];
    let seed_arr = [seed[0], seed[1], seed[2], seed[3]];

    let steps = step_count(cfg.dt, t0 - t_back)?.max(1);
    let dt = (t0 - t_back) / steps as f64;
    let mut back = Vec::with_capacity(steps);
    let end = integrate_delta(seed_arr, cfg.alpha, cfg.momentum, -dt, steps, |x| back.push(x))?;
    let forward = integrate_delta(end, cfg.alpha, cfg.momentum, dt, steps, |_| {})?;
    let scale = seed.amax();
    let round_trip_residual = (0..4).map(|i| (forward[i] - seed_arr[i]).abs()).fold(0.0, f64::max) / scale;

    let mut times = Vec::with_capacity(steps + fp.times.len());
    let mut states = Vec::with_capacity(times.capacity());
    for (n, x) in back.iter().enumerate().rev() {
        times.push(t0 - (n + 1) as f64 * dt);
        states.push(DeltaState::from_array(x));
    }
    for (t, x) in fp.times.iter().zip(&fp.states) {
        times.push(*t);
        states.push(DeltaState::from_array(&[x[0], x[1], x[2], x[3]]));
    }
    Ok(StableManifoldTrajectory {
        config: *cfg,
        constants: k,
        t_start: t0,
        t_end_back: t_back,
        times,
        states,
        seed: DeltaState::from_array(&seed_arr),
        iterations: fp.iterations,
        final_change: fp.change,
        round_trip_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn leading_direction_solves_linear_part() {
        let k = asymptotic_constants(1.0, 1.0).unwrap();
        let x = leading_direction(1.0, &k);
        let a = linearization_matrix(1.0, 1.0).matrix;
        assert!((a * x - x * k.decay_rate).amax() < 1e-12);
        // On the constraint set to leading order: |zeta|^2 = delta M^2 beta.
        let lhs = x[2] * x[2] + x[3] * x[3];
        assert!((lhs - x[1] * x[0]).abs() < 1e-12);
    }

    #[test]
    fn default_start_matches_threshold() {
        let k = asymptotic_constants(1.0, 1.0).unwrap();
        let t = default_t_start(1.0, &k);
        assert!(((-k.decay_rate * t).exp() - 1e-6).abs() < 1e-18);
    }

    #[test]
    fn unit_case_asymptotics() {
        let traj = stable_manifold_trajectory(1.0, 1.0, 1.0, None, None).unwrap();
        let rep = traj.report().unwrap();
        assert!(rep.decay_rate.within(1e-2), "{rep:?}");
        assert!(rep.delta_beta_ratio.within(1e-2), "{rep:?}");
        assert!(rep.round_trip_residual <= 1e-8, "{rep:?}");
        assert!(traj.times.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn fixed_point_solves_the_ode() {
        // Forward RK4 from the seed reproduces the fixed-point grid over a
        // short interval.
        let traj = stable_manifold_trajectory(1.0, 1.0, 1.0, None, None).unwrap();
        let i0 = traj.times.iter().position(|&t| t == traj.t_start).unwrap();
        let steps = 1000;
        let dt = traj.times[i0 + 1] - traj.times[i0];
        let mut x = traj.seed.to_array();
        for _ in 0..steps {
            x = rk4(&x, dt, |y| delta_field(y, 1.0, 1.0));
        }
        let target = traj.states[i0 + steps].to_array();
        let scale = target.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let err = (0..4).map(|i| (x[i] - target[i]).abs()).fold(0.0, f64::max);
        assert!(err < 1e-9 * scale, "relative error {}", err / scale);
    }

    #[test]
    fn trajectory_stays_near_constraint() {
        let traj = stable_manifold_trajectory(1.0, 1.0, 1.0, None, None).unwrap();
        for d in &traj.states {
            let scale = d.beta * d.delta;
            assert!(d.constraint_residual(1.0).abs() < 1e-9 * scale, "t-sample {d:?}");
        }
    }

    #[test]
    fn small_start_time_diverges() {
        let mut cfg = StableManifoldConfig::new(1e4, 1.0, 1.0);
        cfg.t_start = Some(0.0);
        assert!(matches!(
            stable_manifold_trajectory_with(&cfg),
            Err(Error::FixedPointDivergence { .. })
        ));
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(stable_manifold_trajectory(0.0, 1.0, 1.0, None, None).is_err());
        assert!(stable_manifold_trajectory(1.0, 1.0, 1.0, Some(2.0), Some(3.0)).is_err());
    }

    #[test]
    fn csv_layout() {
        let traj = stable_manifold_trajectory(1.0, 1.0, 1.0, None, None).unwrap();
        let csv = traj.to_csv_string();
        assert!(csv.starts_with("t,beta,delta,re_zeta,im_zeta\n"));
        assert_eq!(csv.lines().count(), traj.times.len() + 1);
    }
}
