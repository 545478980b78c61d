//! The flow on `W = { (b + c e^{ix}) / (1 - p e^{ix}) }` as a three-variable
//! ODE, checked against the spectral PDE solver.

use num_complex::Complex64;
use szego::solver::{evolve, SolverConfig};
use szego::w::{classify_w_run, integrate_w_strided, w_to_hardy, WState};

fn main() -> szego::Result<()> {
    let alpha = 1.0;
    let t_end = 5.0;
    let n = 1024;
    let w0 = WState::new(Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.5, 0.0))?;

    let traj = integrate_w_strided(&w0, alpha, 1e-3, t_end, 100)?;
    let (_, w) = traj.last();
    println!("M = {:.6}, drift {:.3e}", w0.momentum(), traj.momentum_drift());
    println!("w(t_end): b = {:.6}, c = {:.6}, p = {:.6}", w.b, w.c, w.p);

    let u0 = w_to_hardy(&w0, n)?;
    let (u, _) = evolve(&u0, &SolverConfig::new(alpha, 1e-3, t_end, n).with_record_stride(1000))?;
    let dist = u.l2_distance(&w_to_hardy(&w, n)?);
    println!("PDE vs ODE at t = {t_end}: l2 distance {dist:.3e}");

    let long = integrate_w_strided(&w0, alpha, 1e-3, 50.0, 100)?;
    println!("t = 50: 1 - |p|^2 = {:.3e}, {:?}", long.last().1.gap(), classify_w_run(&long));
    Ok(())
}
