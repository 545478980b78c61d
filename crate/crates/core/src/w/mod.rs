//! The damped flow restricted to the rank-one manifold
//! `W = { b + c e^{ix} / (1 - p e^{ix}) : c != 0, |p| < 1 }`, its reductions
//! to `(beta, gamma, zeta)`, the closed-form asymptotic constants, and
//! trajectories on the stable manifold of the circle orbit.

mod constants;
mod fit;
mod stable;
mod system;

pub use constants::{
    asymptotic_constants, eigenvalue_mismatch, identity_report, linearization_matrix, linearized_q0,
    AsymptoticConstants, IdentityCheck, IdentityReport, Linearization, IDENTITY_TOL,
};
pub use fit::{
    classify_w_run, gamma_tail_fit, gamma_tail_fit_window, growth_fit, kappa_fit_report, linear_fit,
    wbis_endstate_check, window_indices, Dichotomy, FitReport, GrowthReport, LinearFit, MIN_FIT_POINTS,
};
pub use stable::{
    default_t_start, leading_direction, nonlinearity, stable_manifold_trajectory, stable_manifold_trajectory_with,
    StableManifoldConfig, StableManifoldReport, StableManifoldTrajectory,
};
pub use system::{
    delta_rhs, hardy_to_w, integrate_reduced, integrate_w, integrate_w_strided, reduced_rhs, w_rhs, w_to_hardy,
    DeltaState, ReducedState, ReducedTrajectory, WState, WTrajectory, BOUNDARY_WARNING, DEFAULT_MEMBERSHIP_TOL,
};
