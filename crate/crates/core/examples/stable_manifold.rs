//! A trajectory of the reduced system converging to the circle orbit,
//! built from its scattering data by a fixed-point iteration.

use szego::w::{stable_manifold_trajectory_with, StableManifoldConfig};

fn main() -> szego::Result<()> {
    let cfg = StableManifoldConfig::new(1.0, 1.0, 1.0);
    let traj = stable_manifold_trajectory_with(&cfg)?;
    let report = traj.report()?;
    println!("T_start = {:.4}, integrated back to {:.4}", traj.t_start, traj.t_end_back);
    println!("fixed point: {} iterations, last change {:.2e}", traj.iterations, traj.final_change);
    println!(
        "decay rate of beta: {:.8} (a + alpha = {:.8})",
        report.decay_rate.fitted, report.decay_rate.target
    );
    println!(
        "delta/beta at T_start: {:.8} ((a - alpha)/(a + alpha) = {:.8})",
        report.delta_beta_ratio.fitted, report.delta_beta_ratio.target
    );
    println!("round trip residual {:.3e}", report.round_trip_residual);
    let s = traj.states.first().expect("non-empty trajectory");
    println!("state at t = {:.3}: beta {:.6e}, delta {:.6e}, zeta {:.6e}", traj.times[0], s.beta, s.delta, s.zeta);
    Ok(())
}
