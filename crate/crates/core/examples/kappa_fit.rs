//! `gamma(t) ~ kappa / t` on the reduced system, with
//! `kappa = (alpha^2 + M^2) / (2 alpha M)`.

use num_complex::Complex64;
use szego::w::{asymptotic_constants, gamma_tail_fit_window, integrate_reduced, WState};

fn main() -> szego::Result<()> {
    let alpha = 1.0;
    let t_end: f64 = std::env::args().nth(1).map_or(500.0, |s| s.parse().expect("t_end"));
    let w0 = WState::new(Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.5, 0.0))?;
    let m = w0.momentum();
    let k = asymptotic_constants(alpha, m)?;

    let traj = integrate_reduced(&w0.reduced(), alpha, m, 1e-3, t_end, 100)?;
    let gammas = traj.gammas();
    println!("kappa = {:.6}", k.kappa);
    let mut lo = 10.0;
    while 2.0 * lo <= t_end {
        let fit = gamma_tail_fit_window(&traj.times, &gammas, lo, 2.0 * lo)?;
        println!("mean t*gamma on [{lo}, {}]: {fit:.6}", 2.0 * lo);
        lo *= 2.0;
    }
    println!("max constraint residual {:.3e}", traj.max_constraint_residual());
    Ok(())
}
