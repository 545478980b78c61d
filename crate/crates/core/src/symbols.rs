//! Closed-form Hardy-space symbols used as initial data.

use num_complex::Complex64;

use crate::hardy::{from_grid, GridField, HardyState};

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// Modes of `e^{ix} / (1 - p e^{ix})`: `û(k) = p^{k-1}` for `k >= 1`.
fn pole_modes(k_max: usize, p: Complex64) -> Vec<Complex64> {
    let mut out = vec![zero(); k_max];
    let mut pk = Complex64::new(1.0, 0.0);
    for slot in out.iter_mut().skip(1) {
        *slot = pk;
        pk *= p;
    }
    out
}

/// `e^{ix} / (1 - p e^{ix})`.
pub fn single_pole(grid_size: usize, p: impl Into<Complex64>) -> HardyState {
    HardyState::new(pole_modes(grid_size / 2, p.into()), grid_size).expect("|p| < 1 gives finite modes")
}

/// `e^{ix}/(1 - p1 e^{ix}) + e^{ix}/(1 - p2 e^{ix})`.
pub fn two_poles(grid_size: usize, p1: impl Into<Complex64>, p2: impl Into<Complex64>) -> HardyState {
    let a = pole_modes(grid_size / 2, p1.into());
    let b = pole_modes(grid_size / 2, p2.into());
    HardyState::new(a.iter().zip(&b).map(|(x, y)| x + y).collect(), grid_size)
        .expect("|p| < 1 gives finite modes")
}

/// `c e^{ix}`, a point of the circle orbit of momentum `|c|^2`.
pub fn monomial(grid_size: usize, c: Complex64) -> HardyState {
    HardyState::from_modes(grid_size, &[zero(), c]).expect("grid holds two modes")
}

/// `e^{ix} + eps`.
pub fn perturbed_monomial(grid_size: usize, eps: f64) -> HardyState {
    HardyState::from_modes(grid_size, &[Complex64::new(eps, 0.0), Complex64::new(1.0, 0.0)])
        .expect("grid holds two modes")
}

/// Blaschke product `prod_j (e^{ix} - p_j) / (1 - conj(p_j) e^{ix})`,
/// expanded by truncated convolution of the factor series.
pub fn blaschke(grid_size: usize, zeros: &[Complex64]) -> HardyState {
    let k_max = grid_size / 2;
    let mut acc = vec![zero(); k_max];
    acc[0] = Complex64::new(1.0, 0.0);
    for &p in zeros {
        // -p + (1 - |p|^2) sum_{k >= 1} conj(p)^{k-1} e^{ikx}
        let mut factor = pole_modes(k_max, p.conj());
        for f in factor.iter_mut() {
            *f *= 1.0 - p.norm_sqr();
        }
        factor[0] = -p;
        let mut next = vec![zero(); k_max];
        for (i, a) in acc.iter().enumerate() {
            if *a == zero() {
                continue;
            }
            for (j, f) in factor.iter().take(k_max - i).enumerate() {
                next[i + j] += a * f;
            }
        }
        acc = next;
    }
    HardyState::new(acc, grid_size).expect("|p_j| < 1 gives finite modes")
}

/// `Pi exp(-width x^2)` on the grid `x_n = -pi + 2 pi n / N`.
pub fn gaussian(grid_size: usize, width: f64) -> HardyState {
    let field = GridField::sample(grid_size, |x| Complex64::new((-width * x * x).exp(), 0.0));
    from_grid(&field).expect("grid size is even")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blaschke_factor_expansion() {
        let u = blaschke(64, &[Complex64::new(0.3, 0.0)]);
        assert!((u.coeffs()[0] + 0.3).norm() < 1e-15);
        assert!((u.coeffs()[1].re - 0.91).abs() < 1e-15);
        assert!((u.coeffs()[2].re - 0.91 * 0.3).abs() < 1e-15);
        assert!((u.l2_norm_sq() - 1.0).abs() < 1e-14);
        assert!((u.momentum() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn blaschke_product_is_inner() {
        let u = blaschke(256, &[Complex64::new(0.2, 0.4), Complex64::new(-0.5, 0.1)]);
        // |Psi| = 1 on the circle
        for v in u.to_grid().values() {
            assert!((v.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn gaussian_is_real_even_profile() {
        let u = gaussian(256, 10.0);
        assert!(u.coeffs().iter().all(|c| c.im.abs() < 1e-14));
        // û(0) = (1/2pi) int exp(-10 x^2) dx ~ sqrt(pi/10)/(2 pi)
        let expected = (std::f64::consts::PI / 10.0).sqrt() / (2.0 * std::f64::consts::PI);
        assert!((u.coeffs()[0].re - expected).abs() < 1e-12);
    }
}
