//! Explosion verdicts for a few closed-form symbols.

use num_complex::Complex64;
use szego::hankel::{explosion_criterion, DEFAULT_CLUSTER_TOL};
use szego::symbols::{blaschke, gaussian, monomial, perturbed_monomial, single_pole, two_poles};

fn main() -> szego::Result<()> {
    let n = 512;
    let one = Complex64::new(1.0, 0.0);
    let cases = [
        ("single pole p = 0.5", single_pole(n, 0.5)),
        ("two poles 0.7, 0.8", two_poles(n, 0.7, 0.8)),
        ("Blaschke factor 0.3", blaschke(n, &[Complex64::new(0.3, 0.0)])),
        ("e^{ix}", monomial(n, one)),
        ("e^{ix} + 0.05", perturbed_monomial(n, 0.05)),
        ("Gaussian width 10", gaussian(n, 10.0)),
    ];
    println!("{:<22} {:>12} {:>12} {:>10}  verdict", "u", "||u||^2", "F(u)", "|(u|1)|");
    for (name, u) in cases {
        let v = explosion_criterion(&u, 128, DEFAULT_CLUSTER_TOL, None, None)?;
        println!(
            "{:<22} {:>12.8} {:>12.8} {:>10.3e}  {:?}",
            name, v.l2_sq, v.f_value, v.u0_coeff_abs, v.verdict
        );
    }
    Ok(())
}
