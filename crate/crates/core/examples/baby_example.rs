//! `u0 = e^{ix} + eps`: the L2 norm dips below 1, which by the explosion
//! criterion forces Sobolev growth, and the linearized `|(u|1)|` grows at
//! rate `(a - alpha) / 2`.

use szego::experiments::baby_growth_rate;
use szego::hankel::{explosion_criterion, DEFAULT_CLUSTER_TOL};
use szego::solver::{evolve, SolverConfig};
use szego::symbols::perturbed_monomial;
use szego::w::asymptotic_constants;

fn main() -> szego::Result<()> {
    let (alpha, eps, n) = (1.0, 0.05, 256);
    let u0 = perturbed_monomial(n, eps);
    let cfg = SolverConfig::new(alpha, 1e-3, 20.0, n).with_record_stride(100);
    let (_, series) = evolve(&u0, &cfg)?;
    let (t_min, l2_min) = series
        .rows
        .iter()
        .map(|r| (r.t, r.l2_sq))
        .fold((0.0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
    println!("||u0||^2 = {:.6}, min ||u||^2 = {l2_min:.6} at t = {t_min}", u0.l2_norm_sq());

    let first_below = series.rows.iter().find(|r| r.l2_sq < 1.0);
    if let Some(r) = first_below {
        let u = evolve(&u0, &SolverConfig::new(alpha, 1e-3, r.t, n).with_record_stride(1000))?.0;
        let v = explosion_criterion(&u, 128, DEFAULT_CLUSTER_TOL, None, None)?;
        println!("t = {}: ||u||^2 = {:.6}, F(u) = {:.6}, {:?}", r.t, v.l2_sq, v.f_value, v.verdict);
    }

    let k = asymptotic_constants(alpha, u0.momentum())?;
    let rate = baby_growth_rate(alpha, u0.momentum(), 40.0, 60.0)?;
    println!("linearized |q0| growth rate {rate:.12}, (a - alpha)/2 = {:.12}", k.lambda_plus.re);
    Ok(())
}
