//! Closed-form asymptotic constants and the residuals of the identities
//! tying them together.

use szego::w::identity_report;

fn main() -> szego::Result<()> {
    for alpha in [1.0, 2.0] {
        for m in [1.0, 16.0 / 9.0, 3.0] {
            let r = identity_report(alpha, m, 1.0)?;
            let worst = r.checks.iter().map(|c| c.residual).fold(0.0, f64::max);
            println!(
                "alpha {alpha}, M {m:.4}: a = {:.6}, kappa = {:.6}, c^2(1) = {:.6}, worst residual {worst:.1e}",
                r.a, r.kappa, r.growth_coeff
            );
        }
    }
    let r = identity_report(1.0, 16.0 / 9.0, 1.0)?;
    for c in &r.checks {
        println!("  {:<28} {:.2e}", c.name, c.residual);
    }
    Ok(())
}
