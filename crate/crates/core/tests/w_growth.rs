//! Sobolev growth along `W` against `c^2(s, alpha, M) t^{2s-1}`.

use num_complex::Complex64;
use szego::w::{
    asymptotic_constants, classify_w_run, integrate_w_strided, wbis_endstate_check, Dichotomy, WState,
};

fn single_pole_w() -> WState {
    WState::new(Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.5, 0.0)).unwrap()
}

#[test]
fn h1_growth_matches_asymptotic_law_by_t_200() {
    let w0 = single_pole_w();
    let k = asymptotic_constants(1.0, w0.momentum()).unwrap();
    let traj = integrate_w_strided(&w0, 1.0, 1e-3, 200.0, 100).unwrap();
    let r = wbis_endstate_check(&traj, &k, 1.0).unwrap();
    assert!((r.slope.target - 1.0).abs() < 1e-15);
    assert!(r.slope.within(0.05), "slope {:?}", r.slope);
    assert!(r.prefactor.within(0.10), "prefactor {:?}", r.prefactor);
    assert_eq!(classify_w_run(&traj), Dichotomy::Exploding);
}

#[test]
fn higher_sobolev_exponent_grows_faster() {
    let w0 = single_pole_w();
    let k = asymptotic_constants(1.0, w0.momentum()).unwrap();
    let traj = integrate_w_strided(&w0, 1.0, 1e-3, 200.0, 100).unwrap();
    let r1 = wbis_endstate_check(&traj, &k, 1.0).unwrap();
    let r2 = wbis_endstate_check(&traj, &k, 1.5).unwrap();
    assert!((r2.slope.target - 2.0).abs() < 1e-15);
    assert!(r2.slope.fitted > r1.slope.fitted);
}

#[test]
fn undamped_run_stays_bounded() {
    let w0 = single_pole_w();
    let traj = integrate_w_strided(&w0, 0.0, 1e-3, 50.0, 100).unwrap();
    assert!(traj.momentum_drift() < 1e-10);
    // 1 - |p|^2 oscillates without a trend
    let half = traj.len() / 2;
    let min_gap = |ws: &[WState]| ws.iter().map(|w| w.gap()).fold(f64::INFINITY, f64::min);
    let (early, late) = (min_gap(&traj.states[..half]), min_gap(&traj.states[half..]));
    assert!(late > 0.9 * early, "min gap {early} then {late}");
    let drift = traj.states.iter().map(|w| (w.l2_norm_sq() - w0.l2_norm_sq()).abs()).fold(0.0, f64::max);
    assert!(drift < 1e-10, "L2 drift {drift}");
}
