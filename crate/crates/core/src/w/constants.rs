use nalgebra::Matrix4;
use num_complex::Complex64;
use serde::Serialize;
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};

/// Closed-form constants of the damped flow near the circle orbit of
/// momentum `M`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AsymptoticConstants {
    pub momentum: f64,
    pub alpha: f64,
    /// `(alpha^2 + M^2) / (2 alpha M)`, the limit of `t gamma(t)`.
    pub kappa: f64,
    /// `((sqrt(alpha^4 + 16 M^2 alpha^2) + alpha^2) / 2)^{1/2}`.
    pub a: f64,
    /// `sqrt(a^2 - alpha^2)`.
    pub omega: f64,
    pub lambda_plus: Complex64,
    pub lambda_minus: Complex64,
    /// `a + alpha`.
    pub decay_rate: f64,
    /// `(a + alpha) / 2`.
    pub dist_rate: f64,
}

impl AsymptoticConstants {
    /// `c^2(s, alpha, M) = Gamma(2s + 1) M^{4s - 1} ((alpha^2 + M^2) / (2 alpha))^{1 - 2s}`.
    pub fn growth_coeff(&self, s: f64) -> f64 {
        let (al, m) = (self.alpha, self.momentum);
        gamma(2.0 * s + 1.0) * m.powf(4.0 * s - 1.0) * ((al * al + m * m) / (2.0 * al)).powf(1.0 - 2.0 * s)
    }

    /// The four eigenvalues `alpha +- a`, `alpha +- i omega` of the
    /// linearization matrix.
    pub fn matrix_eigenvalues(&self) -> [Complex64; 4] {
        let al = self.alpha;
        [
            Complex64::new(al + self.a, 0.0),
            Complex64::new(al - self.a, 0.0),
            Complex64::new(al, self.omega),
            Complex64::new(al, -self.omega),
        ]
    }
}

pub fn asymptotic_constants(alpha: f64, momentum: f64) -> Result<AsymptoticConstants> {
    if !(alpha > 0.0 && alpha.is_finite() && momentum > 0.0 && momentum.is_finite()) {
        return Err(Error::Domain(format!(
            "alpha and M must be positive, got alpha = {alpha}, M = {momentum}"
        )));
    }
    let (al, m) = (alpha, momentum);
    let root = (al.powi(4) + 16.0 * m * m * al * al).sqrt();
    let a = ((root + al * al) / 2.0).sqrt();
    // a^2 - alpha^2 = (root - alpha^2) / 2, rationalised to avoid cancellation.
    let omega = (8.0 * m * m * al * al / (root + al * al)).sqrt();
    let disc = Complex64::new(a, omega);
    Ok(AsymptoticConstants {
        momentum: m,
        alpha: al,
        kappa: (al * al + m * m) / (2.0 * al * m),
        a,
        omega,
        lambda_plus: (disc - al) / 2.0,
        lambda_minus: (-disc - al) / 2.0,
        decay_rate: a + al,
        dist_rate: (a + al) / 2.0,
    })
}

/// `q(t) = A+ e^{lambda+ t} + A- e^{lambda- t}`, the solution of
/// `q'' + alpha q' - i alpha M q = 0` with `q(0) = q0_0`, `q'(0) = dq0_0`.
pub fn linearized_q0(alpha: f64, momentum: f64, q0_0: Complex64, dq0_0: Complex64, t: f64) -> Result<Complex64> {
    let k = asymptotic_constants(alpha, momentum)?;
    let (lp, lm) = (k.lambda_plus, k.lambda_minus);
    let gap = lp - lm;
    if gap.norm() < 1e-300 {
        return Err(Error::Domain("characteristic roots coincide".into()));
    }
    let a_plus = (dq0_0 - lm * q0_0) / gap;
    let a_minus = (lp * q0_0 - dq0_0) / gap;
    Ok(a_plus * (lp * t).exp() + a_minus * (lm * t).exp())
}

/// The matrix `A` of the linear part of the `(beta, delta, Re zeta, Im zeta)`
/// system, `X' + A X = Q(X)`, together with its numerically computed spectrum.
#[derive(Clone, Debug)]
pub struct Linearization {
    pub matrix: Matrix4<f64>,
    pub eigenvalues: Vec<Complex64>,
}

pub fn linearization_matrix(alpha: f64, momentum: f64) -> Linearization {
    let m = momentum;
    #[rustfmt::skip]
    let matrix = Matrix4::new(
        2.0 * alpha, 0.0,    0.0,        -2.0,
        0.0,         0.0,    0.0,        -2.0,
        0.0,         0.0,    alpha,      2.0 * m,
        -m * m,      -m * m, -2.0 * m,   alpha,
    );
    let eigenvalues = matrix
        .complex_eigenvalues()
        .iter()
        .map(|z| Complex64::new(z.re, z.im))
        .collect();
    Linearization { matrix, eigenvalues }
}

/// Largest distance from a closed-form eigenvalue to its nearest unused
/// numerical eigenvalue.
pub fn eigenvalue_mismatch(numeric: &[Complex64], closed: &[Complex64]) -> f64 {
    let mut used = vec![false; numeric.len()];
    let mut worst: f64 = 0.0;
    for z in closed {
        let best = numeric
            .iter()
            .enumerate()
            .filter(|(i, _)| !used[*i])
            .map(|(i, w)| (i, (w - z).norm()))
            .min_by(|x, y| x.1.total_cmp(&y.1));
        match best {
            Some((i, d)) => {
                used[i] = true;
                worst = worst.max(d);
            }
            None => return f64::INFINITY,
        }
    }
    worst
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityReport {
    pub alpha: f64,
    pub momentum: f64,
    pub s: f64,
    pub a: f64,
    pub kappa: f64,
    pub growth_coeff: f64,
    pub decay_rate: f64,
    pub checks: Vec<IdentityCheck>,
    pub tolerance: f64,
    pub pass: bool,
}

/// Tolerance on every relative residual reported by [`identity_report`].
pub const IDENTITY_TOL: f64 = 1e-10;

/// Evaluates the closed forms and the relative residual of each identity
/// relating them.
pub fn identity_report(alpha: f64, momentum: f64, s: f64) -> Result<IdentityReport> {
    let k = asymptotic_constants(alpha, momentum)?;
    let (al, m) = (alpha, momentum);
    let lin = linearization_matrix(al, m);
    let closed = k.matrix_eigenvalues();
    let root_res = |l: Complex64| (l * l + al * l - Complex64::new(0.0, m * al)).norm() / (m * al);
    let det_closed: Complex64 = closed.iter().product();
    let det = lin.matrix.determinant();
    let c2_direct = 4.0 * al * m.powi(3) / (al * al + m * m);
    let checks = vec![
        ("a_exceeds_alpha", (al - k.a).max(0.0)),
        ("a_sqrt_a2_minus_alpha2", (k.a * (k.a * k.a - al * al).sqrt() - 2.0 * m * al).abs() / (2.0 * m * al)),
        ("a_omega_product", (k.a * k.omega - 2.0 * m * al).abs() / (2.0 * m * al)),
        ("lambda_sum", (k.lambda_plus + k.lambda_minus + al).norm() / al),
        ("lambda_product", (k.lambda_plus * k.lambda_minus + Complex64::new(0.0, m * al)).norm() / (m * al)),
        ("lambda_plus_root", root_res(k.lambda_plus)),
        ("lambda_minus_root", root_res(k.lambda_minus)),
        ("lambda_plus_real_part", (k.lambda_plus.re - (k.a - al) / 2.0).abs() / al),
        ("matrix_eigenvalues", eigenvalue_mismatch(&lin.eigenvalues, &closed) / k.decay_rate),
        ("matrix_trace", (lin.matrix.trace() - 4.0 * al).abs() / al),
        ("matrix_determinant", (det - det_closed).norm() / det.abs().max(f64::MIN_POSITIVE)),
        ("growth_coeff_s1", (k.growth_coeff(1.0) - c2_direct).abs() / c2_direct),
    ];
    let checks: Vec<IdentityCheck> = checks
        .into_iter()
        .map(|(name, residual)| IdentityCheck {
            name: name.to_string(),
            residual,
        })
        .collect();
    let pass = checks.iter().all(|c| c.residual <= IDENTITY_TOL);
    Ok(IdentityReport {
        alpha: al,
        momentum: m,
        s,
        a: k.a,
        kappa: k.kappa,
        growth_coeff: k.growth_coeff(s),
        decay_rate: k.decay_rate,
        checks,
        tolerance: IDENTITY_TOL,
        pass,
    })
}
