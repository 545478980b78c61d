//! Hankel-operator spectra and the explosion criterion.
//!
//! `H_u^2` and `K_u^2` are represented by their Gram matrices in the Fourier
//! basis, truncated to a finite size. Eigenvalues come from a Householder
//! tridiagonalization followed by implicit QL, which is deterministic for a
//! given input.

use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hardy::HardyState;
use crate::io::fmt_f64;

pub const DEFAULT_GRAM_SIZE: usize = 128;
pub const DEFAULT_CLUSTER_TOL: f64 = 1e-8;
/// Relative rank cutoff, scaled by the largest eigenvalue.
pub const DEFAULT_RANK_CUTOFF_REL: f64 = 1e-10;
/// Absolute rank cutoff used when the spectrum is identically zero.
pub const RANK_CUTOFF_FLOOR: f64 = 1e-14;
pub const DEFAULT_CRITERION_TOL_REL: f64 = 1e-8;

/// Dense row-major Hermitian matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl HermitianMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        let data = (0..n * n).map(|idx| f(idx / n, idx % n)).collect();
        Self { n, data }
    }

    /// Real symmetric matrix from rows.
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        Self::from_fn(n, |i, j| Complex64::new(rows[i][j], 0.0))
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i).re).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `max |m_ij - conj(m_ji)|`.
    pub fn hermitian_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for i in 0..self.n {
            for j in i..self.n {
                dev = dev.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        dev
    }
}

fn check_size(u: &HardyState, size: usize) -> Result<()> {
    if size > u.modes() {
        return Err(Error::Truncation {
            requested: size,
            available: u.modes(),
        });
    }
    Ok(())
}

/// `A[n][m] = sum_k û(n+k) conj(û(m+k)) ` over the `offset`-shifted symbol.
fn hankel_gram(coeffs: &[Complex64], size: usize, offset: usize) -> HermitianMatrix {
    let len = coeffs.len();
    let mut g = HermitianMatrix::zeros(size);
    for n in 0..size {
        for m in n..size {
            let start = n.max(m) + offset;
            let mut acc = Complex64::new(0.0, 0.0);
            if start < len {
                for k in 0..len - start {
                    acc += coeffs[n + offset + k] * coeffs[m + offset + k].conj();
                }
            }
            g.data[n * size + m] = acc;
            g.data[m * size + n] = acc.conj();
        }
    }
    g
}

/// Gram matrix of `H_u^2`, truncated to `size x size`.
pub fn gram_h(u: &HardyState, size: usize) -> Result<HermitianMatrix> {
    check_size(u, size)?;
    Ok(hankel_gram(u.coeffs(), size, 0))
}

/// Gram matrix of `K_u^2` (the Hankel operator of the shifted symbol).
pub fn gram_k(u: &HardyState, size: usize) -> Result<HermitianMatrix> {
    check_size(u, size)?;
    Ok(hankel_gram(u.coeffs(), size, 1))
}

/// `sum_{k >= size} (k + 1) |û(k)|^2`: the part of `Tr H_u^2` a
/// `size x size` truncation cannot see.
pub fn tail_mass(u: &HardyState, size: usize) -> f64 {
    u.coeffs()
        .iter()
        .enumerate()
        .skip(size)
        .map(|(k, c)| (k + 1) as f64 * c.norm_sqr())
        .fold(0.0, |acc, x| acc + x)
}

/// All eigenvalues of a Hermitian matrix, in descending order.
///
/// `tol` is the relative deflation threshold for the QL sweep; values are
/// accurate to about `max(tol, eps) * ||m||`.
pub fn eigenvalues(m: &HermitianMatrix, tol: f64) -> Result<Vec<f64>> {
    let scale = m.data.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let deviation = m.hermitian_deviation();
    if deviation > 1e-12 * scale.max(1.0) {
        return Err(Error::NonHermitian { deviation });
    }
    let n = m.n;
    if n == 0 {
        return Ok(Vec::new());
    }
    let (mut d, mut e) = tridiagonalize(m);
    tridiagonal_ql(&mut d, &mut e, tol.max(0.0) * m.frobenius_norm())?;
    d.sort_by(|a, b| b.total_cmp(a));
    Ok(d)
}

/// Householder reduction to a real symmetric tridiagonal matrix with the
/// same spectrum. Returns the diagonal and the subdiagonal (padded with a
/// trailing zero).
fn tridiagonalize(m: &HermitianMatrix) -> (Vec<f64>, Vec<f64>) {
    let n = m.n;
    let mut a = m.data.clone();
    let mut sub = vec![0.0; n];
    let zero = Complex64::new(0.0, 0.0);
    let mut v = vec![zero; n];
    let mut p = vec![zero; n];

    for k in 0..n.saturating_sub(2) {
        let len = n - k - 1;
        let sigma = (0..len).map(|i| a[(k + 1 + i) * n + k].norm_sqr()).sum::<f64>().sqrt();
        if sigma == 0.0 {
            continue;
        }
        let x0 = a[(k + 1) * n + k];
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { Complex64::new(1.0, 0.0) };
        let alpha = -phase * sigma;

        for i in 0..len {
            v[i] = a[(k + 1 + i) * n + k];
        }
        v[0] -= alpha;
        let vnorm = v[..len].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            sub[k] = sigma;
            continue;
        }
        for z in v[..len].iter_mut() {
            *z /= vnorm;
        }

        // p = B v on the trailing block, then w = p - (v^* p) v
        for i in 0..len {
            let row = (k + 1 + i) * n + k + 1;
            p[i] = (0..len).map(|j| a[row + j] * v[j]).sum();
        }
        let kappa: Complex64 = (0..len).map(|i| v[i].conj() * p[i]).sum();
        for i in 0..len {
            p[i] -= kappa * v[i];
        }
        // B <- B - 2 v w^* - 2 w v^*
        for i in 0..len {
            let row = (k + 1 + i) * n + k + 1;
            for j in 0..len {
                a[row + j] -= 2.0 * (v[i] * p[j].conj() + p[i] * v[j].conj());
            }
        }
        sub[k] = sigma;
    }
    if n >= 2 {
        sub[n - 2] = a[(n - 1) * n + n - 2].norm();
    }
    let diag = (0..n).map(|i| a[i * n + i].re).collect();
    (diag, sub)
}

/// Implicit QL with Wilkinson-style shifts on a symmetric tridiagonal
/// matrix; `e[i]` couples `d[i]` and `d[i+1]`.
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64], abs_tol: f64) -> Result<()> {
    let n = d.len();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd || e[m].abs() <= abs_tol {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 100 {
                return Err(Error::Domain(format!(
                    "tridiagonal QL did not converge for eigenvalue {l}"
                )));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut deflated = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Largest violation of `h_1 >= k_1 >= h_2 >= k_2 >= ...` between the
/// descending spectra of `H_u^2` and `K_u^2`.
pub fn interlacing_violation(h_eigs: &[f64], k_eigs: &[f64]) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, &k) in k_eigs.iter().enumerate() {
        if let Some(&h) = h_eigs.get(i) {
            worst = worst.max(k - h);
        }
        if let Some(&h_next) = h_eigs.get(i + 1) {
            worst = worst.max(h_next - k);
        }
    }
    worst
}

/// Distinct positive eigenvalues of `K_u^2`, strictly decreasing, with
/// their numerical multiplicities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KSpectrum {
    pub distinct_eigenvalues: Vec<f64>,
    pub multiplicities: Vec<usize>,
    pub cluster_tol: f64,
    /// Absolute cutoff actually applied.
    pub rank_cutoff: f64,
    /// Tail mass left outside the truncated Gram matrix.
    pub tail_mass: f64,
}

impl KSpectrum {
    /// Builds a spectrum from raw eigenvalues: drops those at or below the
    /// cutoff and merges chains of neighbours closer than
    /// `cluster_tol * sigma_1^2`.
    pub fn from_eigenvalues(eigs: &[f64], cluster_tol: f64, rank_cutoff: Option<f64>) -> Self {
        let mut sorted = eigs.to_vec();
        sorted.sort_by(|a, b| b.total_cmp(a));
        let top = sorted.first().copied().unwrap_or(0.0).max(0.0);
        let cutoff = rank_cutoff.unwrap_or(if top > 0.0 {
            DEFAULT_RANK_CUTOFF_REL * top
        } else {
            RANK_CUTOFF_FLOOR
        });
        let gap = cluster_tol * top;

        let mut distinct = Vec::new();
        let mut multiplicities = Vec::new();
        let mut cluster: Vec<f64> = Vec::new();
        let mut flush = |cluster: &mut Vec<f64>| {
            if !cluster.is_empty() {
                distinct.push(cluster.iter().sum::<f64>() / cluster.len() as f64);
                multiplicities.push(cluster.len());
                cluster.clear();
            }
        };
        for &x in sorted.iter().filter(|&&x| x > cutoff) {
            if let Some(&last) = cluster.last() {
                if last - x > gap {
                    flush(&mut cluster);
                }
            }
            cluster.push(x);
        }
        flush(&mut cluster);

        Self {
            distinct_eigenvalues: distinct,
            multiplicities,
            cluster_tol,
            rank_cutoff: cutoff,
            tail_mass: 0.0,
        }
    }

    pub fn rank(&self) -> usize {
        self.multiplicities.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.distinct_eigenvalues.is_empty()
    }

    /// True when some distinct eigenvalue absorbed more than one numerical
    /// eigenvalue.
    pub fn has_merged_clusters(&self) -> bool {
        self.multiplicities.iter().any(|&m| m > 1)
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "index,eigenvalue,multiplicity")?;
        for (i, (v, m)) in self.distinct_eigenvalues.iter().zip(&self.multiplicities).enumerate() {
            writeln!(w, "{},{},{}", i + 1, fmt_f64(*v), m)?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("CSV output is ASCII")
    }
}

/// Spectrum of `K_u^2` on a `size x size` truncation. `rank_cutoff = None`
/// applies the default `1e-10 * sigma_1^2` rule.
pub fn k_spectrum(
    u: &HardyState,
    size: usize,
    cluster_tol: f64,
    rank_cutoff: Option<f64>,
) -> Result<KSpectrum> {
    let g = gram_k(u, size)?;
    let eigs = eigenvalues(&g, 0.0)?;
    let mut spec = KSpectrum::from_eigenvalues(&eigs, cluster_tol, rank_cutoff);
    spec.tail_mass = tail_mass(u, size);
    Ok(spec)
}

/// `F(u) = sigma_1^2 - sigma_2^2 + sigma_3^2 - ...` over distinct eigenvalues.
pub fn f_functional(spec: &KSpectrum) -> f64 {
    spec.distinct_eigenvalues
        .iter()
        .enumerate()
        .map(|(k, s)| if k % 2 == 0 { *s } else { -*s })
        .sum()
}

/// Squared L2 norm of any weak limit point of a bounded damped trajectory.
/// Numerically the same alternating sum as [`f_functional`].
pub fn weak_limit_l2(spec: &KSpectrum) -> f64 {
    f_functional(spec)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    /// `||u||^2 < F(u)`.
    ExplodesStrict,
    /// `||u||^2 = F(u)` and `(u|1) != 0`.
    ExplodesEqualCase,
    /// No claim either way.
    Inconclusive,
}

impl Verdict {
    pub fn certifies_explosion(self) -> bool {
        !matches!(self, Verdict::Inconclusive)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionVerdict {
    pub l2_sq: f64,
    pub momentum: f64,
    pub f_value: f64,
    pub u0_coeff_abs: f64,
    pub tol: f64,
    pub verdict: Verdict,
    /// Set when the spectrum needed numerical clustering.
    pub clustered: bool,
    pub spectrum_tail_mass: f64,
}

/// Classifies `u` from its L2 norm, `F(u)` and `(u|1)`.
///
/// `tol = None` uses `1e-8 * max(1, ||u||^2)`.
pub fn explosion_criterion(
    u: &HardyState,
    size: usize,
    cluster_tol: f64,
    rank_cutoff: Option<f64>,
    tol: Option<f64>,
) -> Result<CriterionVerdict> {
    let spec = k_spectrum(u, size, cluster_tol, rank_cutoff)?;
    Ok(criterion_from_spectrum(u, &spec, tol))
}

pub fn criterion_from_spectrum(u: &HardyState, spec: &KSpectrum, tol: Option<f64>) -> CriterionVerdict {
    let l2_sq = u.l2_norm_sq();
    let f_value = f_functional(spec);
    let u0_coeff_abs = u.inner_with_one().norm();
    let tol = tol.unwrap_or(DEFAULT_CRITERION_TOL_REL * l2_sq.max(1.0));
    let verdict = if l2_sq < f_value - tol {
        Verdict::ExplodesStrict
    } else if (l2_sq - f_value).abs() <= tol && u0_coeff_abs > tol {
        Verdict::ExplodesEqualCase
    } else {
        Verdict::Inconclusive
    };
    CriterionVerdict {
        l2_sq,
        momentum: u.momentum(),
        f_value,
        u0_coeff_abs,
        tol,
        verdict,
        clustered: spec.has_merged_clusters(),
        spectrum_tail_mass: spec.tail_mass,
    }
}

/// JSON summary written next to `spectrum.csv`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSummary {
    pub l2_sq: f64,
    pub momentum: f64,
    pub f_value: f64,
    pub verdict: Verdict,
}

impl From<&CriterionVerdict> for SpectrumSummary {
    fn from(v: &CriterionVerdict) -> Self {
        Self {
            l2_sq: v.l2_sq,
            momentum: v.momentum,
            f_value: v.f_value,
            verdict: v.verdict,
        }
    }
}
