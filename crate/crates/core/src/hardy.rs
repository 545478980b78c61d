//! Hardy-space states as truncated Fourier coefficient vectors.
//!
//! A state on a grid of `N` points keeps the modes `k = 0 .. N/2 - 1`. The
//! Nyquist mode and every negative frequency are identically zero, so the
//! projection onto the Hardy space is simply "drop those coefficients" after a
//! forward transform.
//!
//! Grid samples live at `x_n = -pi + 2 pi n / N` for `n = 1 ..= N`; entry `j`
//! of a [`GridField`] is the sample at `x_{j+1}`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Truncated nonnegative-frequency Fourier coefficients `û(0) .. û(N/2 - 1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct HardyState {
    coeffs: Vec<Complex64>,
    grid_size: usize,
}

fn check_grid_size(n: usize) -> Result<()> {
    if n == 0 || n % 2 != 0 {
        return Err(Error::InvalidGrid(format!(
            "grid size must be even and positive, got {n}"
        )));
    }
    Ok(())
}

impl HardyState {
    pub fn new(coeffs: Vec<Complex64>, grid_size: usize) -> Result<Self> {
        check_grid_size(grid_size)?;
        if coeffs.len() != grid_size / 2 {
            return Err(Error::InvalidGrid(format!(
                "expected {} coefficients for N = {grid_size}, got {}",
                grid_size / 2,
                coeffs.len()
            )));
        }
        if let Some(mode) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(Error::NonFinite { mode });
        }
        Ok(Self { coeffs, grid_size })
    }

    pub fn zeros(grid_size: usize) -> Result<Self> {
        check_grid_size(grid_size)?;
        Ok(Self {
            coeffs: vec![Complex64::new(0.0, 0.0); grid_size / 2],
            grid_size,
        })
    }

    /// Builds a state from its leading modes, zero-padding the rest.
    pub fn from_modes(grid_size: usize, modes: &[Complex64]) -> Result<Self> {
        check_grid_size(grid_size)?;
        let k = grid_size / 2;
        if modes.len() > k {
            return Err(Error::Truncation {
                requested: modes.len(),
                available: k,
            });
        }
        let mut coeffs = modes.to_vec();
        coeffs.resize(k, Complex64::new(0.0, 0.0));
        Self::new(coeffs, grid_size)
    }

    pub fn from_fn(grid_size: usize, f: impl FnMut(usize) -> Complex64) -> Result<Self> {
        check_grid_size(grid_size)?;
        Self::new((0..grid_size / 2).map(f).collect(), grid_size)
    }

    /// Wraps coefficients already known to be valid (solver internals).
    pub(crate) fn from_raw(coeffs: Vec<Complex64>, grid_size: usize) -> Self {
        debug_assert_eq!(coeffs.len() * 2, grid_size);
        Self { coeffs, grid_size }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn grid_size(&self) -> usize {
        self.grid_size
    }

    /// Number of stored modes, `N / 2`.
    pub fn modes(&self) -> usize {
        self.coeffs.len()
    }

    /// `(u | 1) = û(0)`.
    pub fn inner_with_one(&self) -> Complex64 {
        self.coeffs[0]
    }

    pub fn l2_norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `M(u) = sum_{k >= 1} k |û(k)|^2`.
    pub fn momentum(&self) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| k as f64 * c.norm_sqr())
            .sum()
    }

    /// `sum_k (1 + k^2)^s |û(k)|^2`.
    pub fn hs_norm_sq(&self, s: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| (1.0 + (k * k) as f64).powf(s) * c.norm_sqr())
            .sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `sqrt(sum |û(k) - v̂(k)|^2)`; states must share a grid size.
    pub fn l2_distance(&self, other: &HardyState) -> f64 {
        assert_eq!(self.grid_size, other.grid_size, "grid size mismatch");
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn to_grid(&self) -> GridField {
        FourierGrid::new(self.grid_size)
            .expect("state grid size is valid")
            .to_grid(self)
    }
}

impl fmt::Display for HardyState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "HardyState(N = {}, |u|^2 = {:.6e}, M = {:.6e})",
            self.grid_size,
            self.l2_norm_sq(),
            self.momentum()
        )
    }
}

/// Samples at `x_n = -pi + 2 pi n / N`, `n = 1 ..= N`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridField {
    values: Vec<Complex64>,
}

impl GridField {
    pub fn new(values: Vec<Complex64>) -> Self {
        Self { values }
    }

    /// Samples `f(x_n)` on an `N`-point grid.
    pub fn sample(n: usize, f: impl Fn(f64) -> Complex64) -> Self {
        Self {
            values: (1..=n).map(|i| f(grid_point(i, n))).collect(),
        }
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// `x_n = -pi + 2 pi n / N`.
pub fn grid_point(n: usize, grid_size: usize) -> f64 {
    -PI + 2.0 * PI * n as f64 / grid_size as f64
}

/// FFT plans and the `e^{i k x_1}` phase table for one grid size.
///
/// Holding the plans lets the solver reuse them across millions of
/// transforms; the struct is immutable and shareable between threads.
#[derive(Clone)]
pub struct FourierGrid {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    phase: Vec<Complex64>,
}

impl fmt::Debug for FourierGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FourierGrid").field("n", &self.n).finish()
    }
}

impl FourierGrid {
    pub fn new(n: usize) -> Result<Self> {
        check_grid_size(n)?;
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        // e^{i k x_1} = (-1)^k e^{2 pi i k / N}
        let phase = (0..n)
            .map(|k| {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                Complex64::from_polar(sign, 2.0 * PI * k as f64 / n as f64)
            })
            .collect();
        Ok(Self {
            n,
            forward,
            inverse,
            phase,
        })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn scratch_len(&self) -> usize {
        self.forward
            .get_inplace_scratch_len()
            .max(self.inverse.get_inplace_scratch_len())
    }

    /// Writes grid values of the modes `coeffs` (at most `N` of them) into `out`.
    pub fn synthesize_into(
        &self,
        coeffs: &[Complex64],
        out: &mut [Complex64],
        scratch: &mut [Complex64],
    ) {
        debug_assert!(coeffs.len() <= self.n && out.len() == self.n);
        for (k, slot) in out.iter_mut().enumerate() {
            *slot = coeffs
                .get(k)
                .map_or(Complex64::new(0.0, 0.0), |c| c * self.phase[k]);
        }
        self.inverse.process_with_scratch(out, scratch);
    }

    /// Transforms `values` in place and writes the first `out.len()`
    /// nonnegative modes into `out`; everything else is discarded.
    pub fn analyze_into(
        &self,
        values: &mut [Complex64],
        out: &mut [Complex64],
        scratch: &mut [Complex64],
    ) {
        debug_assert!(values.len() == self.n && out.len() <= self.n / 2);
        self.forward.process_with_scratch(values, scratch);
        let scale = 1.0 / self.n as f64;
        for (k, slot) in out.iter_mut().enumerate() {
            *slot = values[k] * self.phase[k].conj() * scale;
        }
    }

    pub fn to_grid(&self, u: &HardyState) -> GridField {
        assert_eq!(u.grid_size(), self.n, "grid size mismatch");
        let mut out = vec![Complex64::new(0.0, 0.0); self.n];
        let mut scratch = vec![Complex64::new(0.0, 0.0); self.scratch_len()];
        self.synthesize_into(u.coeffs(), &mut out, &mut scratch);
        GridField::new(out)
    }

    pub fn from_grid(&self, f: &GridField) -> Result<HardyState> {
        if f.len() != self.n {
            return Err(Error::InvalidGrid(format!(
                "field has {} samples, grid expects {}",
                f.len(),
                self.n
            )));
        }
        let mut values = f.values().to_vec();
        let mut out = vec![Complex64::new(0.0, 0.0); self.n / 2];
        let mut scratch = vec![Complex64::new(0.0, 0.0); self.scratch_len()];
        self.analyze_into(&mut values, &mut out, &mut scratch);
        HardyState::new(out, self.n)
    }
}

pub fn to_grid(u: &HardyState) -> GridField {
    u.to_grid()
}

/// DFT of the samples followed by the Szegő projection.
pub fn from_grid(f: &GridField) -> Result<HardyState> {
    FourierGrid::new(f.len())?.from_grid(f)
}
