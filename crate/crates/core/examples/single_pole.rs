//! Growth of `||u(t)||^2_{H^1}` from `u0 = e^{ix} / (1 - p e^{ix})`.
//!
//! The slope of the H^1 curve on the second half of the run is compared
//! with the asymptotic coefficient `4 alpha M^3 / (alpha^2 + M^2)`.
//!
//! ```text
//! cargo run --release --example single_pole -- [N] [t_end]
//! ```

use szego::experiments::h1_linear_fit;
use szego::solver::{check_lyapunov, evolve, SolverConfig};
use szego::symbols::single_pole;
use szego::w::asymptotic_constants;

fn main() -> szego::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(1024, |s| s.parse().expect("N"));
    let t_end: f64 = args.next().map_or(10.0, |s| s.parse().expect("t_end"));
    let alpha = 1.0;

    let u0 = single_pole(n, 0.5);
    let cfg = SolverConfig::new(alpha, 2e-4, t_end, n).with_record_stride(10);
    let (u, series) = evolve(&u0, &cfg)?;

    let k = asymptotic_constants(alpha, u0.momentum())?;
    let line = h1_linear_fit(&series, t_end / 2.0, t_end)?;
    println!("M = {:.6}", u0.momentum());
    println!("H1 slope on [{}, {}]: {:.6}", t_end / 2.0, t_end, line.slope);
    println!("asymptotic coefficient: {:.6}", k.growth_coeff(1.0));
    println!("momentum drift: {:.3e}", series.momentum_drift());
    println!("Lyapunov residual: {:.3e}", check_lyapunov(&series, alpha)?);
    println!("final ||u||^2 = {:.6e}, |u^(0)| = {:.3e}", u.l2_norm_sq(), u.inner_with_one().norm());
    if let Some(t) = series.resolution_lost_at {
        println!("resolution lost at t = {t}; increase N");
    }
    Ok(())
}
