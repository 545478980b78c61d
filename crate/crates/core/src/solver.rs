//! Time integration of the damped cubic Szegő equation
//! `i u_t + i alpha (u|1) = Pi(|u|^2 u)` in coefficient space.
//!
//! The cubic term is evaluated pseudospectrally: synthesize on the grid, form
//! `|u|^2 u` pointwise, analyze and drop the negative modes. Steps are
//! classical RK4, each followed by a Krasny filter that zeroes coefficients
//! below a roundoff-scale threshold.

use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hardy::{FourierGrid, HardyState};
use crate::io::fmt_f64;

/// Squared L2 norm beyond which a run is declared blown up.
pub const BLOWUP_L2_SQ: f64 = 1e12;
/// A run is under-resolved once `|û(K-1)|` exceeds this fraction of `max |û|`.
pub const RESOLUTION_LOSS_RATIO: f64 = 1e-8;
pub const DEFAULT_KRASNY_THRESHOLD: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KrasnyMode {
    /// Zero every coefficient whose modulus is below the threshold.
    Absolute,
    /// Threshold is scaled by `max |û(k)|` of the initial state.
    RelativeToInitialMax,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub alpha: f64,
    pub dt: f64,
    pub t_end: f64,
    pub grid_size: usize,
    /// `0` disables the filter.
    pub krasny_threshold: f64,
    pub krasny_mode: KrasnyMode,
    pub record_stride: usize,
    pub sobolev_exponents: Vec<f64>,
    /// Evaluate the cubic term on a zero-padded `2N` grid (alias free).
    pub dealias: bool,
}

impl SolverConfig {
    pub fn new(alpha: f64, dt: f64, t_end: f64, grid_size: usize) -> Self {
        Self {
            alpha,
            dt,
            t_end,
            grid_size,
            krasny_threshold: DEFAULT_KRASNY_THRESHOLD,
            krasny_mode: KrasnyMode::Absolute,
            record_stride: 1,
            sobolev_exponents: vec![1.0],
            dealias: false,
        }
    }

    pub fn with_record_stride(mut self, stride: usize) -> Self {
        self.record_stride = stride;
        self
    }

    pub fn with_sobolev(mut self, exponents: Vec<f64>) -> Self {
        self.sobolev_exponents = exponents;
        self
    }

    pub fn with_krasny(mut self, threshold: f64, mode: KrasnyMode) -> Self {
        self.krasny_threshold = threshold;
        self.krasny_mode = mode;
        self
    }

    pub fn with_dealias(mut self, dealias: bool) -> Self {
        self.dealias = dealias;
        self
    }

    /// Number of RK4 steps; `dt * steps` matches `t_end` to within one step.
    pub fn steps(&self) -> usize {
        (self.t_end / self.dt).round().max(1.0) as usize
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Domain(msg));
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return bad(format!("alpha must be >= 0, got {}", self.alpha));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad(format!("dt must be > 0, got {}", self.dt));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return bad(format!("t_end must be > 0, got {}", self.t_end));
        }
        if self.grid_size == 0 || self.grid_size % 2 != 0 {
            return Err(Error::InvalidGrid(format!(
                "grid size must be even and positive, got {}",
                self.grid_size
            )));
        }
        if !(0.0..1.0).contains(&self.krasny_threshold) {
            return bad(format!(
                "krasny threshold must lie in [0, 1), got {}",
                self.krasny_threshold
            ));
        }
        if self.record_stride == 0 {
            return bad("record_stride must be positive".into());
        }
        if let Some(s) = self.sobolev_exponents.iter().find(|s| !(**s >= 0.5)) {
            return bad(format!("Sobolev exponents must be >= 1/2, got {s}"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRow {
    pub t: f64,
    pub l2_sq: f64,
    pub momentum: f64,
    /// `|û(0)| = |(u|1)|`
    pub u0_abs: f64,
    /// One entry per requested Sobolev exponent.
    pub hs_sq: Vec<f64>,
}

impl DiagnosticsRow {
    pub fn measure(t: f64, u: &HardyState, exponents: &[f64]) -> Self {
        Self {
            t,
            l2_sq: u.l2_norm_sq(),
            momentum: u.momentum(),
            u0_abs: u.inner_with_one().norm(),
            hs_sq: exponents.iter().map(|&s| u.hs_norm_sq(s)).collect(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsSeries {
    pub sobolev_exponents: Vec<f64>,
    pub rows: Vec<DiagnosticsRow>,
    /// First record time at which the last retained mode was too large.
    pub resolution_lost_at: Option<f64>,
}

impl DiagnosticsSeries {
    pub fn new(sobolev_exponents: Vec<f64>) -> Self {
        Self {
            sobolev_exponents,
            rows: Vec::new(),
            resolution_lost_at: None,
        }
    }

    pub fn times(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.t).collect()
    }

    /// Column of `||u||_{H^s}^2` for the `idx`-th requested exponent.
    pub fn hs_column(&self, idx: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r.hs_sq[idx]).collect()
    }

    /// Column for exponent `s`, if it was recorded.
    pub fn hs_column_for(&self, s: f64) -> Option<Vec<f64>> {
        self.sobolev_exponents
            .iter()
            .position(|&e| (e - s).abs() < 1e-12)
            .map(|i| self.hs_column(i))
    }

    /// `max_t |M(t) - M(0)| / M(0)`.
    pub fn momentum_drift(&self) -> f64 {
        let Some(first) = self.rows.first() else {
            return 0.0;
        };
        let m0 = first.momentum;
        let dev = self
            .rows
            .iter()
            .map(|r| (r.momentum - m0).abs())
            .fold(0.0, f64::max);
        if m0 > 0.0 {
            dev / m0
        } else {
            dev
        }
    }

    pub fn csv_header(&self) -> String {
        let mut h = String::from("t,l2_sq,momentum,u0_abs");
        for s in &self.sobolev_exponents {
            h.push_str(&format!(",hs_sq_{s:.2}"));
        }
        h
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{}", self.csv_header())?;
        for r in &self.rows {
            write!(
                w,
                "{},{},{},{}",
                fmt_f64(r.t),
                fmt_f64(r.l2_sq),
                fmt_f64(r.momentum),
                fmt_f64(r.u0_abs)
            )?;
            for v in &r.hs_sq {
                write!(w, ",{}", fmt_f64(*v))?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("CSV output is ASCII")
    }
}

/// Reusable pseudospectral workspace for one grid size.
#[derive(Debug)]
pub struct SzegoSolver {
    modes: usize,
    grid: FourierGrid,
    field: Vec<Complex64>,
    scratch: Vec<Complex64>,
    stage: Vec<Complex64>,
    k: [Vec<Complex64>; 4],
}

impl SzegoSolver {
    pub fn new(grid_size: usize, dealias: bool) -> Result<Self> {
        let grid = FourierGrid::new(if dealias { 2 * grid_size } else { grid_size })?;
        let modes = grid_size / 2;
        let zero = Complex64::new(0.0, 0.0);
        Ok(Self {
            modes,
            field: vec![zero; grid.size()],
            scratch: vec![zero; grid.scratch_len()],
            grid,
            stage: vec![zero; modes],
            k: std::array::from_fn(|_| vec![zero; modes]),
        })
    }

    pub fn grid_size(&self) -> usize {
        2 * self.modes
    }

    /// `Pi(|u|^2 u)` into `out`.
    fn cubic_into(&mut self, u: &[Complex64], out: &mut [Complex64]) {
        self.grid.synthesize_into(u, &mut self.field, &mut self.scratch);
        for v in self.field.iter_mut() {
            *v *= v.norm_sqr();
        }
        self.grid.analyze_into(&mut self.field, out, &mut self.scratch);
    }

    /// `du/dt = -i Pi(|u|^2 u) - alpha û(0) e_0`.
    fn rhs_into(&mut self, u: &[Complex64], alpha: f64, out: &mut [Complex64]) {
        self.cubic_into(u, out);
        let minus_i = Complex64::new(0.0, -1.0);
        for v in out.iter_mut() {
            *v *= minus_i;
        }
        out[0] -= alpha * u[0];
    }

    pub fn rhs(&mut self, u: &HardyState, alpha: f64) -> HardyState {
        assert_eq!(u.grid_size(), self.grid_size(), "grid size mismatch");
        let mut out = vec![Complex64::new(0.0, 0.0); self.modes];
        self.rhs_into(u.coeffs(), alpha, &mut out);
        HardyState::from_raw(out, self.grid_size())
    }

    /// One RK4 step in place; returns `false` when the result is not finite
    /// or exceeds the blow-up bound.
    fn step_in_place(&mut self, u: &mut [Complex64], alpha: f64, dt: f64) -> bool {
        let mut k = std::mem::take(&mut self.k);
        let mut stage = std::mem::take(&mut self.stage);

        self.rhs_into(u, alpha, &mut k[0]);
        for ((s, x), d) in stage.iter_mut().zip(u.iter()).zip(&k[0]) {
            *s = x + d * (0.5 * dt);
        }
        self.rhs_into(&stage, alpha, &mut k[1]);
        for ((s, x), d) in stage.iter_mut().zip(u.iter()).zip(&k[1]) {
            *s = x + d * (0.5 * dt);
        }
        self.rhs_into(&stage, alpha, &mut k[2]);
        for ((s, x), d) in stage.iter_mut().zip(u.iter()).zip(&k[2]) {
            *s = x + d * dt;
        }
        self.rhs_into(&stage, alpha, &mut k[3]);

        let w = dt / 6.0;
        let mut l2 = 0.0;
        for (i, x) in u.iter_mut().enumerate() {
            *x += (k[0][i] + 2.0 * (k[1][i] + k[2][i]) + k[3][i]) * w;
            l2 += x.norm_sqr();
        }

        self.k = k;
        self.stage = stage;
        l2.is_finite() && l2 <= BLOWUP_L2_SQ
    }

    /// RK4 step followed by an absolute Krasny filter (`None` disables it).
    ///
    /// A blow-up is reported with `t = dt`, the time reached from the step's
    /// own origin; [`evolve`] reports absolute times instead.
    pub fn rk4_step(
        &mut self,
        u: &HardyState,
        alpha: f64,
        dt: f64,
        krasny: Option<f64>,
    ) -> Result<HardyState> {
        assert_eq!(u.grid_size(), self.grid_size(), "grid size mismatch");
        if !(dt > 0.0) {
            return Err(Error::Domain(format!("dt must be > 0, got {dt}")));
        }
        let mut coeffs = u.coeffs().to_vec();
        if !self.step_in_place(&mut coeffs, alpha, dt) {
            return Err(Error::BlowUp { t: dt });
        }
        if let Some(threshold) = krasny {
            filter_in_place(&mut coeffs, threshold);
        }
        Ok(HardyState::from_raw(coeffs, self.grid_size()))
    }
}

fn filter_in_place(coeffs: &mut [Complex64], threshold: f64) {
    if threshold <= 0.0 {
        return;
    }
    for c in coeffs.iter_mut() {
        if c.norm() < threshold {
            *c = Complex64::new(0.0, 0.0);
        }
    }
}

pub fn rhs(u: &HardyState, alpha: f64) -> HardyState {
    SzegoSolver::new(u.grid_size(), false)
        .expect("state grid size is valid")
        .rhs(u, alpha)
}

pub fn rk4_step(u: &HardyState, alpha: f64, dt: f64, krasny: Option<f64>) -> Result<HardyState> {
    SzegoSolver::new(u.grid_size(), false)?.rk4_step(u, alpha, dt, krasny)
}

/// Zeroes every coefficient with modulus below `threshold`.
pub fn krasny_filter(u: &HardyState, threshold: f64) -> HardyState {
    let mut coeffs = u.coeffs().to_vec();
    filter_in_place(&mut coeffs, threshold);
    HardyState::from_raw(coeffs, u.grid_size())
}

fn resolution_lost(coeffs: &[Complex64]) -> bool {
    let max = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    max > 0.0 && coeffs[coeffs.len() - 1].norm() > RESOLUTION_LOSS_RATIO * max
}

/// Integrates to `cfg.t_end`, recording diagnostics at step 0, every
/// `record_stride` steps, and at the final step.
pub fn evolve(u0: &HardyState, cfg: &SolverConfig) -> Result<(HardyState, DiagnosticsSeries)> {
    cfg.validate()?;
    if u0.grid_size() != cfg.grid_size {
        return Err(Error::InvalidGrid(format!(
            "initial state has N = {}, config has N = {}",
            u0.grid_size(),
            cfg.grid_size
        )));
    }
    let mut solver = SzegoSolver::new(cfg.grid_size, cfg.dealias)?;
    let threshold = match cfg.krasny_mode {
        KrasnyMode::Absolute => cfg.krasny_threshold,
        KrasnyMode::RelativeToInitialMax => cfg.krasny_threshold * u0.max_abs(),
    };

    let mut series = DiagnosticsSeries::new(cfg.sobolev_exponents.clone());
    let mut coeffs = u0.coeffs().to_vec();
    let steps = cfg.steps();
    let record = |step: usize, coeffs: &[Complex64], series: &mut DiagnosticsSeries| {
        let t = step as f64 * cfg.dt;
        let u = HardyState::from_raw(coeffs.to_vec(), cfg.grid_size);
        series
            .rows
            .push(DiagnosticsRow::measure(t, &u, &cfg.sobolev_exponents));
        if series.resolution_lost_at.is_none() && resolution_lost(coeffs) {
            series.resolution_lost_at = Some(t);
        }
    };

    record(0, &coeffs, &mut series);
    for step in 1..=steps {
        if !solver.step_in_place(&mut coeffs, cfg.alpha, cfg.dt) {
            return Err(Error::BlowUp {
                t: step as f64 * cfg.dt,
            });
        }
        filter_in_place(&mut coeffs, threshold);
        if step % cfg.record_stride == 0 || step == steps {
            record(step, &coeffs, &mut series);
        }
    }
    Ok((HardyState::from_raw(coeffs, cfg.grid_size), series))
}

/// Largest residual of `d/dt ||u||^2 + 2 alpha |(u|1)|^2 = 0` over interior
/// record times, using centered differences, divided by `max(1, ||u_0||^2)`.
pub fn check_lyapunov(series: &DiagnosticsSeries, alpha: f64) -> Result<f64> {
    let rows = &series.rows;
    if rows.len() < 3 {
        return Err(Error::Domain(format!(
            "Lyapunov check needs at least 3 records, got {}",
            rows.len()
        )));
    }
    let scale = rows[0].l2_sq.max(1.0);
    let worst = rows
        .windows(3)
        .map(|w| {
            let dl = (w[2].l2_sq - w[0].l2_sq) / (w[2].t - w[0].t);
            (dl + 2.0 * alpha * w[1].u0_abs * w[1].u0_abs).abs()
        })
        .fold(0.0, f64::max);
    Ok(worst / scale)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn single_pole(n: usize, p: f64) -> HardyState {
        HardyState::from_fn(n, |k| if k == 0 { c(0.0, 0.0) } else { c(p.powi(k as i32 - 1), 0.0) })
            .unwrap()
    }

    /// Cubic term by direct convolution of the coefficient sequences.
    fn cubic_by_convolution(u: &[Complex64]) -> Vec<Complex64> {
        let k = u.len();
        let mut out = vec![c(0.0, 0.0); k];
        for (i, a) in u.iter().enumerate() {
            for (j, b) in u.iter().enumerate() {
                for (l, d) in u.iter().enumerate() {
                    let m = i + j;
                    if m >= l && m - l < k {
                        out[m - l] += a * b * d.conj();
                    }
                }
            }
        }
        out
    }

    #[test]
    fn rhs_on_circle_orbit() {
        let amp = c(0.6, -0.8) * 1.3;
        let u = HardyState::from_modes(32, &[c(0.0, 0.0), amp]).unwrap();
        for alpha in [0.0, 1.0, 2.5] {
            let f = rhs(&u, alpha);
            let m = amp.norm_sqr();
            assert!((f.coeffs()[1] - c(0.0, -m) * amp).norm() < 1e-14);
            let rest: f64 = f.coeffs().iter().enumerate().filter(|(k, _)| *k != 1).map(|(_, v)| v.norm()).sum();
            assert!(rest < 1e-14);
        }
    }

    #[test]
    fn rhs_of_zero_and_constant() {
        let zero = HardyState::zeros(16).unwrap();
        assert_eq!(rhs(&zero, 1.0).max_abs(), 0.0);
        let b = c(0.3, 0.7);
        let u = HardyState::from_modes(16, &[b]).unwrap();
        let alpha = 0.4;
        let f = rhs(&u, alpha);
        let expected = c(0.0, -1.0) * b.norm_sqr() * b - alpha * b;
        assert!((f.coeffs()[0] - expected).norm() < 1e-15);
    }

    #[test]
    fn cubic_term_matches_convolution_oracle() {
        // no aliasing: live modes occupy the bottom quarter of the stored range
        let n = 64;
        let live = 8;
        let u = HardyState::from_fn(n, |k| {
            if k < live { c((k as f64 * 0.37).sin(), (k as f64 * 0.91).cos() * 0.5) } else { c(0.0, 0.0) }
        })
        .unwrap();
        let f = rhs(&u, 0.0);
        let oracle = cubic_by_convolution(u.coeffs());
        for (a, b) in f.coeffs().iter().zip(&oracle) {
            assert!((a - c(0.0, -1.0) * b).norm() < 1e-13);
        }
    }

    #[test]
    fn dealiased_cubic_matches_convolution_on_full_band() {
        let n = 32;
        let u = HardyState::from_fn(n, |k| c(0.8f64.powi(k as i32), 0.1 * k as f64)).unwrap();
        let mut solver = SzegoSolver::new(n, true).unwrap();
        let f = solver.rhs(&u, 0.0);
        let oracle = cubic_by_convolution(u.coeffs());
        for (a, b) in f.coeffs().iter().zip(&oracle) {
            assert!((a - c(0.0, -1.0) * b).norm() < 1e-12);
        }
    }

    #[test]
    fn krasny_filter_zeroes_small_modes_only() {
        let mut modes = vec![c(1.0, 0.0), c(0.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1e-13, 0.0)];
        let u = HardyState::from_modes(16, &modes).unwrap();
        let f = krasny_filter(&u, 1e-12);
        assert_eq!(f.coeffs()[5], c(0.0, 0.0));
        assert_eq!(f.coeffs()[0], c(1.0, 0.0));
        modes[5] = c(2e-12, 0.0);
        let big = HardyState::from_modes(16, &modes).unwrap();
        assert_eq!(krasny_filter(&big, 1e-12).coeffs()[5], c(2e-12, 0.0));
        let zero = HardyState::zeros(16).unwrap();
        assert_eq!(krasny_filter(&zero, 1e-12), zero);
    }

    #[test]
    fn rk4_step_of_zero_is_zero() {
        let zero = HardyState::zeros(16).unwrap();
        assert_eq!(rk4_step(&zero, 1.0, 1e-2, Some(1e-12)).unwrap(), zero);
    }

    #[test]
    fn rk4_tracks_circle_phase() {
        let n = 16;
        let mut solver = SzegoSolver::new(n, false).unwrap();
        let mut u = HardyState::from_modes(n, &[c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        for _ in 0..1000 {
            u = solver.rk4_step(&u, 0.0, 1e-3, Some(1e-12)).unwrap();
        }
        let exact = Complex64::from_polar(1.0, -1.0);
        assert!((u.coeffs()[1] - exact).norm() < 1e-10);
    }

    #[test]
    fn blow_up_is_reported() {
        let u = HardyState::from_modes(8, &[c(1e4, 0.0)]).unwrap();
        match rk4_step(&u, 0.0, 1.0, None) {
            Err(Error::BlowUp { t }) => assert_eq!(t, 1.0),
            other => panic!("expected blow-up, got {other:?}"),
        }
    }

    #[test]
    fn evolve_rejects_mismatched_grid() {
        let u = HardyState::zeros(16).unwrap();
        let cfg = SolverConfig::new(1.0, 1e-2, 1.0, 32);
        assert!(matches!(evolve(&u, &cfg), Err(Error::InvalidGrid(_))));
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig::new(1.0, 1e-3, 1.0, 64).validate().is_ok());
        assert!(SolverConfig::new(-1.0, 1e-3, 1.0, 64).validate().is_err());
        assert!(SolverConfig::new(1.0, 0.0, 1.0, 64).validate().is_err());
        assert!(SolverConfig::new(1.0, 1e-3, 1.0, 63).validate().is_err());
        assert!(SolverConfig::new(1.0, 1e-3, 1.0, 64).with_krasny(1.0, KrasnyMode::Absolute).validate().is_err());
        assert!(SolverConfig::new(1.0, 1e-3, 1.0, 64).with_sobolev(vec![0.4]).validate().is_err());
        let cfg = SolverConfig::new(1.0, 0.3, 1.0, 64);
        assert!((cfg.dt * cfg.steps() as f64 - cfg.t_end).abs() <= cfg.dt);
    }

    #[test]
    fn circle_orbit_conserves_norms() {
        let u0 = HardyState::from_modes(64, &[c(0.0, 0.0), c(0.8, 0.6)]).unwrap();
        let cfg = SolverConfig::new(1.0, 1e-3, 20.0, 64).with_record_stride(100);
        let (_, series) = evolve(&u0, &cfg).unwrap();
        for r in &series.rows {
            assert!((r.l2_sq - 1.0).abs() < 1e-12);
            assert!((r.momentum - 1.0).abs() < 1e-12);
        }
        assert!(check_lyapunov(&series, 1.0).unwrap() < 1e-10);
    }

    #[test]
    fn undamped_run_has_flat_lyapunov_residual() {
        let u0 = single_pole(128, 0.5);
        let cfg = SolverConfig::new(0.0, 1e-3, 2.0, 128).with_record_stride(10);
        let (_, series) = evolve(&u0, &cfg).unwrap();
        assert!(check_lyapunov(&series, 0.0).unwrap() < 1e-10);
    }

    #[test]
    fn damped_l2_is_nonincreasing() {
        let u0 = single_pole(1024, 0.5);
        let u0 = HardyState::from_fn(1024, |k| u0.coeffs()[k] + if k == 0 { c(0.2, 0.1) } else { c(0.0, 0.0) }).unwrap();
        let cfg = SolverConfig::new(1.0, 1e-3, 3.0, 1024);
        let (_, series) = evolve(&u0, &cfg).unwrap();
        for w in series.rows.windows(2) {
            assert!(w[1].l2_sq <= w[0].l2_sq + 1e-10);
        }
        assert!(series.momentum_drift() < 1e-9, "drift {:e}", series.momentum_drift());
        assert!(series.resolution_lost_at.is_none());
    }

    #[test]
    fn lyapunov_needs_three_rows() {
        let series = DiagnosticsSeries::new(vec![1.0]);
        assert!(check_lyapunov(&series, 1.0).is_err());
    }

    #[test]
    fn csv_layout() {
        let u0 = single_pole(32, 0.3);
        let cfg = SolverConfig::new(1.0, 0.1, 0.2, 32).with_sobolev(vec![1.0, 1.5]);
        let (_, series) = evolve(&u0, &cfg).unwrap();
        let csv = series.to_csv_string();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "t,l2_sq,momentum,u0_abs,hs_sq_1.00,hs_sq_1.50");
        let first: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(first.len(), 6);
        assert_eq!(first[0], "0.0000000000000000e0");
        assert_eq!(csv.lines().count(), 1 + 3);
        assert!(!csv.contains('\r'));
    }
}
