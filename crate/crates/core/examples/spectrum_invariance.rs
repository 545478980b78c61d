//! The spectrum of `K_u^2` is conserved by the damped flow.
//!
//! Two-pole data has rank two; its nonzero eigenvalues are printed at a few
//! times along one trajectory.

use szego::hankel::{k_spectrum, DEFAULT_CLUSTER_TOL};
use szego::solver::{evolve, SolverConfig};
use szego::symbols::two_poles;

fn main() -> szego::Result<()> {
    let n = 1024;
    let mut u = two_poles(n, 0.7, 0.8);
    let segment = 1.0;
    for i in 0..=4 {
        if i > 0 {
            let cfg = SolverConfig::new(1.0, 2e-4, segment, n).with_record_stride(1000);
            u = evolve(&u, &cfg)?.0;
        }
        let spec = k_spectrum(&u, 128, DEFAULT_CLUSTER_TOL, None)?;
        println!(
            "t = {:.1}  rank {}  eigenvalues {:?}  ||u||^2 = {:.6}",
            i as f64 * segment,
            spec.rank(),
            spec.distinct_eigenvalues,
            u.l2_norm_sq()
        );
    }
    Ok(())
}
