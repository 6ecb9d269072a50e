use nla_core::applications::phase_sweep;
use nla_core::equivalence::{run_theorem_suite, SuiteGrid};
use nla_core::fock::{cat_state, wigner_grid};
use nla_core::{CatParity, Execution, NlaGain};

fn small_grid() -> SuiteGrid {
    SuiteGrid {
        transmissions: vec![0.6],
        noises: vec![0.0, 0.2],
        gains: vec![1.2],
        dim: 24,
        ..SuiteGrid::default()
    }
}

#[test]
fn suite_is_identical_in_both_modes() {
    let seq = run_theorem_suite(&small_grid(), Execution::Sequential).unwrap();
    let par = run_theorem_suite(&small_grid(), Execution::Parallel).unwrap();
    assert_eq!(seq, par);
    assert_eq!(seq.len(), 10);
    assert!(seq.iter().all(|c| c.report.passed));
}

#[test]
fn phase_sweep_is_identical_in_both_modes() {
    let g = NlaGain::new(1.5).unwrap();
    let grid: Vec<f64> = (0..64).map(|i| 0.025 * i as f64).collect();
    let seq = phase_sweep(1.0, g, &grid, Execution::Sequential).unwrap();
    let par = phase_sweep(1.0, g, &grid, Execution::Parallel).unwrap();
    assert_eq!(seq, par);
}

#[test]
fn wigner_grid_matches_pointwise_evaluation() {
    let cat = cat_state(1.2.into(), CatParity::Odd, 24).unwrap();
    let xs: Vec<f64> = (-4..=4).map(|i| i as f64 * 0.75).collect();
    let ps = xs.clone();
    let w = wigner_grid(&cat, &xs, &ps);
    for (i, &x) in xs.iter().enumerate() {
        for (j, &p) in ps.iter().enumerate() {
            assert!((w[(i, j)] - nla_core::fock::wigner_at(&cat, x, p)).abs() < 1e-14);
        }
    }
    // Odd cat: negative at the origin.
    assert!(w[(4, 4)] < 0.0);
}
