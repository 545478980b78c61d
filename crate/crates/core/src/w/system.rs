use std::io::Write;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hardy::HardyState;
use crate::io::fmt_f64;

/// Distance of `|p|` to the unit circle below which a run is flagged as
/// having left the resolvable regime.
pub const BOUNDARY_WARNING: f64 = 1e-6;

/// Default ratio tolerance for [`hardy_to_w`].
pub const DEFAULT_MEMBERSHIP_TOL: f64 = 1e-8;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// The rational symbol `b + c e^{ix} / (1 - p e^{ix})`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WState {
    pub b: Complex64,
    pub c: Complex64,
    pub p: Complex64,
}

impl WState {
    pub fn new(b: Complex64, c: Complex64, p: Complex64) -> Result<Self> {
        if !(b.is_finite() && c.is_finite() && p.is_finite()) {
            return Err(Error::Domain("non-finite W coordinates".into()));
        }
        if p.norm() >= 1.0 {
            return Err(Error::Domain(format!("|p| = {} must be < 1", p.norm())));
        }
        if c == Complex64::new(0.0, 0.0) {
            return Err(Error::Domain("c = 0 leaves W".into()));
        }
        Ok(Self { b, c, p })
    }

    /// `1 - |p|^2`.
    pub fn gap(&self) -> f64 {
        1.0 - self.p.norm_sqr()
    }

    /// `M = |c|^2 / (1 - |p|^2)^2`.
    pub fn momentum(&self) -> f64 {
        let g = self.gap();
        self.c.norm_sqr() / (g * g)
    }

    pub fn l2_norm_sq(&self) -> f64 {
        self.b.norm_sqr() + self.c.norm_sqr() / self.gap()
    }

    /// `sum_k (1 + k^2)^s |û(k)|^2` summed over the full geometric series.
    pub fn hs_norm_sq(&self, s: f64) -> f64 {
        let r = self.p.norm_sqr();
        let c2 = self.c.norm_sqr();
        let mut sum = 0.0;
        let mut rk = 1.0;
        let mut k = 1u64;
        loop {
            let kf = k as f64;
            let term = (1.0 + kf * kf).powf(s) * rk;
            sum += term;
            // The weight grows polynomially, so wait until it is past its peak.
            if term <= 1e-18 * sum && kf * (1.0 - r) > 2.0 * s.max(0.0) + 1.0 {
                break;
            }
            if k >= 100_000_000 {
                break;
            }
            rk *= r;
            k += 1;
        }
        self.b.norm_sqr() + c2 * sum
    }

    pub fn reduced(&self) -> ReducedState {
        let m = self.momentum();
        ReducedState {
            beta: self.b.norm_sqr(),
            gamma: m * self.gap(),
            zeta: m * self.c * self.b.conj() * self.p.conj(),
        }
    }

    /// Multiplies `b` and `c` by `e^{i theta}`.
    pub fn rotated(&self, theta: f64) -> Self {
        let e = Complex64::from_polar(1.0, theta);
        Self {
            b: self.b * e,
            c: self.c * e,
            p: self.p,
        }
    }

    fn to_array(self) -> [f64; 6] {
        [self.b.re, self.b.im, self.c.re, self.c.im, self.p.re, self.p.im]
    }

    fn from_array(x: &[f64; 6]) -> Self {
        Self {
            b: Complex64::new(x[0], x[1]),
            c: Complex64::new(x[2], x[3]),
            p: Complex64::new(x[4], x[5]),
        }
    }
}

/// `(beta, gamma, zeta) = (|b|^2, M (1 - |p|^2), M c conj(b) conj(p))`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReducedState {
    pub beta: f64,
    pub gamma: f64,
    pub zeta: Complex64,
}

impl ReducedState {
    /// `|zeta|^2 - (M - gamma) gamma^2 beta`.
    pub fn constraint_residual(&self, momentum: f64) -> f64 {
        self.zeta.norm_sqr() - (momentum - self.gamma) * self.gamma * self.gamma * self.beta
    }

    pub fn to_delta(&self, momentum: f64) -> DeltaState {
        DeltaState {
            beta: self.beta,
            delta: momentum - self.gamma,
            zeta: self.zeta,
        }
    }

    fn to_array(self) -> [f64; 4] {
        [self.beta, self.gamma, self.zeta.re, self.zeta.im]
    }

    fn from_array(x: &[f64; 4]) -> Self {
        Self {
            beta: x[0],
            gamma: x[1],
            zeta: Complex64::new(x[2], x[3]),
        }
    }
}

/// The reduced state with `delta = M |p|^2 = M - gamma` in place of `gamma`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeltaState {
    pub beta: f64,
    pub delta: f64,
    pub zeta: Complex64,
}

impl DeltaState {
    pub fn to_gamma(&self, momentum: f64) -> ReducedState {
        ReducedState {
            beta: self.beta,
            gamma: momentum - self.delta,
            zeta: self.zeta,
        }
    }

    /// `|zeta|^2 - delta (M - delta)^2 beta`.
    pub fn constraint_residual(&self, momentum: f64) -> f64 {
        let md = momentum - self.delta;
        self.zeta.norm_sqr() - self.delta * md * md * self.beta
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.beta, self.delta, self.zeta.re, self.zeta.im]
    }

    pub fn from_array(x: &[f64; 4]) -> Self {
        Self {
            beta: x[0],
            delta: x[1],
            zeta: Complex64::new(x[2], x[3]),
        }
    }
}

/// Expands the geometric series: `û(0) = b`, `û(k) = c p^{k-1}`.
pub fn w_to_hardy(w: &WState, grid_size: usize) -> Result<HardyState> {
    if w.p.norm() >= 1.0 {
        return Err(Error::Domain(format!("|p| = {} must be < 1", w.p.norm())));
    }
    let mut pk = w.c;
    HardyState::from_fn(grid_size, |k| {
        if k == 0 {
            w.b
        } else {
            let out = pk;
            pk *= w.p;
            out
        }
    })
}

/// Reads `(b, c, p)` off the coefficients, checking that the ratios
/// `û(k+1)/û(k)` agree with `p` over the resolved modes.
pub fn hardy_to_w(u: &HardyState, tol: f64) -> Result<WState> {
    let c = u.coeffs();
    if c.len() < 3 {
        return Err(Error::Truncation {
            requested: 3,
            available: c.len(),
        });
    }
    let scale = u.max_abs();
    if c[1].norm() <= 1e-14 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::NotInW {
            deviation: f64::INFINITY,
        });
    }
    let p = c[2] / c[1];
    // Compare û(k+1) with p û(k) so that underflowed tails do not divide by zero.
    let mut deviation: f64 = 0.0;
    for k in 1..c.len() - 1 {
        let d = (c[k + 1] - p * c[k]).norm() / c[k].norm().max(1e-300);
        if c[k].norm() > 1e-12 * scale {
            deviation = deviation.max(d);
        } else {
            deviation = deviation.max((c[k + 1] - p * c[k]).norm() / scale);
        }
    }
    if deviation > tol {
        return Err(Error::NotInW { deviation });
    }
    WState::new(c[0], c[1], p).map_err(|_| Error::NotInW { deviation })
}

/// The damped flow restricted to `W`:
///
/// ```text
/// i(b' + alpha b) = (|b|^2 + 2M(1-|p|^2)) b + M c conj(p)
/// i c'            = (2|b|^2 + M) c + 2M(1-|p|^2) b p
/// i p'            = M(1-|p|^2) p + c conj(b)
/// ```
pub fn w_rhs(w: &WState, alpha: f64) -> (Complex64, Complex64, Complex64) {
    let m = w.momentum();
    let g = w.gap();
    let b2 = w.b.norm_sqr();
    let db = -alpha * w.b - I * ((b2 + 2.0 * m * g) * w.b + m * w.c * w.p.conj());
    let dc = -I * ((2.0 * b2 + m) * w.c + 2.0 * m * g * w.b * w.p);
    let dp = -I * (m * g * w.p + w.c * w.b.conj());
    (db, dc, dp)
}

/// ```text
/// beta'  + 2 alpha beta = 2 Im zeta
/// gamma'                = -2 Im zeta
/// zeta' + (alpha + iM) zeta = (3i gamma - i beta) zeta - 2i beta gamma M
///                             + i gamma^2 (M - gamma + 3 beta)
/// ```
pub fn reduced_rhs(r: &ReducedState, alpha: f64, momentum: f64) -> (f64, f64, Complex64) {
    let m = momentum;
    let (beta, gamma, zeta) = (r.beta, r.gamma, r.zeta);
    let dbeta = -2.0 * alpha * beta + 2.0 * zeta.im;
    let dgamma = -2.0 * zeta.im;
    let dzeta = -(alpha + I * m) * zeta + I * (3.0 * gamma - beta) * zeta
        - 2.0 * I * beta * gamma * m
        + I * gamma * gamma * (m - gamma + 3.0 * beta);
    (dbeta, dgamma, dzeta)
}

/// ```text
/// delta' = 2 Im zeta
/// zeta' + (alpha - 2iM) zeta = -i(3 delta + beta) zeta
///                              + i (M - delta)^2 (delta + beta) - 2i beta delta (M - delta)
/// ```
pub fn delta_rhs(d: &DeltaState, alpha: f64, momentum: f64) -> (f64, f64, Complex64) {
    let m = momentum;
    let (beta, delta, zeta) = (d.beta, d.delta, d.zeta);
    let dbeta = -2.0 * alpha * beta + 2.0 * zeta.im;
    let ddelta = 2.0 * zeta.im;
    let md = m - delta;
    let dzeta = -(alpha - 2.0 * I * m) * zeta - I * (3.0 * delta + beta) * zeta
        + I * md * md * (delta + beta)
        - 2.0 * I * beta * delta * md;
    (dbeta, ddelta, dzeta)
}

/// One classical Runge-Kutta step of `x' = f(x)`.
pub(crate) fn rk4<const D: usize>(x: &[f64; D], dt: f64, f: impl Fn(&[f64; D]) -> [f64; D]) -> [f64; D] {
    let axpy = |a: &[f64; D], h: f64, k: &[f64; D]| -> [f64; D] {
        let mut out = *a;
        for (o, ki) in out.iter_mut().zip(k) {
            *o += h * ki;
        }
        out
    };
    let k1 = f(x);
    let k2 = f(&axpy(x, 0.5 * dt, &k1));
    let k3 = f(&axpy(x, 0.5 * dt, &k2));
    let k4 = f(&axpy(x, dt, &k3));
    let mut out = *x;
    for i in 0..D {
        out[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

fn w_field(x: &[f64; 6], alpha: f64) -> [f64; 6] {
    let (db, dc, dp) = w_rhs(&WState::from_array(x), alpha);
    [db.re, db.im, dc.re, dc.im, dp.re, dp.im]
}

fn reduced_field(x: &[f64; 4], alpha: f64, m: f64) -> [f64; 4] {
    let (db, dg, dz) = reduced_rhs(&ReducedState::from_array(x), alpha, m);
    [db, dg, dz.re, dz.im]
}

pub(crate) fn delta_field(x: &[f64; 4], alpha: f64, m: f64) -> [f64; 4] {
    let (db, dd, dz) = delta_rhs(&DeltaState::from_array(x), alpha, m);
    [db, dd, dz.re, dz.im]
}

pub(crate) fn step_count(dt: f64, t_end: f64) -> Result<usize> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::Domain(format!("dt must be positive, got {dt}")));
    }
    if !(t_end.is_finite() && t_end >= 0.0) {
        return Err(Error::Domain(format!("t_end must be nonnegative, got {t_end}")));
    }
    Ok((t_end / dt).round() as usize)
}

/// Recorded samples of a run of the `(b, c, p)` system.
#[derive(Clone, Debug)]
pub struct WTrajectory {
    pub alpha: f64,
    pub times: Vec<f64>,
    pub states: Vec<WState>,
    /// First recorded time at which `1 - |p| < BOUNDARY_WARNING`.
    pub near_boundary_at: Option<f64>,
}

impl WTrajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last(&self) -> (f64, WState) {
        (*self.times.last().unwrap(), *self.states.last().unwrap())
    }

    /// Largest relative deviation of `M` from its initial value.
    pub fn momentum_drift(&self) -> f64 {
        let m0 = self.states[0].momentum();
        self.states
            .iter()
            .map(|w| (w.momentum() - m0).abs() / m0)
            .fold(0.0, f64::max)
    }

    pub fn gammas(&self) -> Vec<f64> {
        self.states.iter().map(|w| w.reduced().gamma).collect()
    }

    pub fn reduced(&self) -> Vec<ReducedState> {
        self.states.iter().map(WState::reduced).collect()
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "t,re_b,im_b,re_c,im_c,re_p,im_p,beta,gamma,momentum")?;
        for (t, w) in self.times.iter().zip(&self.states) {
            let r = w.reduced();
            let fields = [
                *t,
                w.b.re,
                w.b.im,
                w.c.re,
                w.c.im,
                w.p.re,
                w.p.im,
                r.beta,
                r.gamma,
                w.momentum(),
            ];
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

/// RK4 on [`w_rhs`], recording every step.
pub fn integrate_w(w0: &WState, alpha: f64, dt: f64, t_end: f64) -> Result<WTrajectory> {
    integrate_w_strided(w0, alpha, dt, t_end, 1)
}

/// RK4 on [`w_rhs`], recording step 0, every `stride`-th step and the last.
pub fn integrate_w_strided(
    w0: &WState,
    alpha: f64,
    dt: f64,
    t_end: f64,
    stride: usize,
) -> Result<WTrajectory> {
    let steps = step_count(dt, t_end)?;
    let stride = stride.max(1);
    let mut traj = WTrajectory {
        alpha,
        times: vec![0.0],
        states: vec![*w0],
        near_boundary_at: None,
    };
    let mut x = w0.to_array();
    for n in 1..=steps {
        x = rk4(&x, dt, |y| w_field(y, alpha));
        let t = n as f64 * dt;
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::BlowUp { t });
        }
        let w = WState::from_array(&x);
        if w.p.norm() >= 1.0 {
            return Err(Error::Domain(format!("|p| reached 1 at t = {t}")));
        }
        if traj.near_boundary_at.is_none() && 1.0 - w.p.norm() < BOUNDARY_WARNING {
            traj.near_boundary_at = Some(t);
        }
        if n % stride == 0 || n == steps {
            traj.times.push(t);
            traj.states.push(w);
        }
    }
    Ok(traj)
}

/// Recorded samples of a run of the `(beta, gamma, zeta)` system.
#[derive(Clone, Debug)]
pub struct ReducedTrajectory {
    pub alpha: f64,
    pub momentum: f64,
    pub times: Vec<f64>,
    pub states: Vec<ReducedState>,
}

impl ReducedTrajectory {
    pub fn gammas(&self) -> Vec<f64> {
        self.states.iter().map(|r| r.gamma).collect()
    }

    pub fn max_constraint_residual(&self) -> f64 {
        self.states
            .iter()
            .map(|r| r.constraint_residual(self.momentum).abs())
            .fold(0.0, f64::max)
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "t,beta,gamma,re_zeta,im_zeta")?;
        for (t, r) in self.times.iter().zip(&self.states) {
            let fields = [*t, r.beta, r.gamma, r.zeta.re, r.zeta.im];
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

/// RK4 on [`reduced_rhs`] at fixed momentum.
pub fn integrate_reduced(
    r0: &ReducedState,
    alpha: f64,
    momentum: f64,
    dt: f64,
    t_end: f64,
    stride: usize,
) -> Result<ReducedTrajectory> {
    let steps = step_count(dt, t_end)?;
    let stride = stride.max(1);
    let mut traj = ReducedTrajectory {
        alpha,
        momentum,
        times: vec![0.0],
        states: vec![*r0],
    };
    let mut x = r0.to_array();
    for n in 1..=steps {
        x = rk4(&x, dt, |y| reduced_field(y, alpha, momentum));
        let t = n as f64 * dt;
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::BlowUp { t });
        }
        if n % stride == 0 || n == steps {
            traj.times.push(t);
            traj.states.push(ReducedState::from_array(&x));
        }
    }
    Ok(traj)
}
