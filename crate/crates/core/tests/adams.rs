//! Fractional Adams solver: classical reduction, convergence and the
//! Volterra form of the Riccati equation.

use mlrh::adams::{adams_at, adams_solve};
use mlrh::model::{classical_h, FourierArg, ModelParams};
use mlrh::pricer::g_from_h;
use mlrh::special_fn::reciprocal_gamma;
use mlrh::Error;
use num_complex::Complex64;

fn reference_arg() -> FourierArg {
    FourierArg::from_parts(3.0, -0.5).unwrap()
}

#[test]
fn classical_case_converges_at_second_order() {
    let m = ModelParams::new(0.5, 0.4, -0.65, 1.0).unwrap();
    let a = reference_arg();
    let exact = classical_h(&m, a, 2.0).unwrap();
    let errs: Vec<f64> = [200, 400, 800].iter().map(|&n| (adams_at(&m, a, 2.0, n).unwrap() - exact).norm()).collect();
    assert!(errs[2] < 1e-5, "{errs:?}");
    for w in errs.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!((1.7..2.3).contains(&order), "observed order {order} from {errs:?}");
    }
}

#[test]
fn rough_case_self_converges() {
    let m = ModelParams::realistic();
    let a = reference_arg();
    let t = 1.0;
    let coarse = adams_at(&m, a, t, 200).unwrap();
    let fine = adams_at(&m, a, t, 1000).unwrap();
    let finest = adams_at(&m, a, t, 4000).unwrap();
    assert!((fine - finest).norm() < (coarse - finest).norm());
    assert!((fine - finest).norm() < 1e-4 * finest.norm().max(1.0));
}

#[test]
fn grid_value_and_interpolation_agree_on_nodes() {
    let m = ModelParams::realistic();
    let grid = adams_solve(&m, reference_arg(), 1.0, 100).unwrap();
    assert_eq!(grid.steps(), 100);
    assert!((grid.step() - 0.01).abs() < 1e-15);
    assert_eq!(grid.interpolate(0.5), grid.h[50]);
    let between = grid.interpolate(0.505);
    assert!((between - 0.5 * (grid.h[50] + grid.h[51])).norm() < 1e-3 * grid.h[50].norm());
}

#[test]
fn solution_satisfies_the_fractional_equation() {
    // L1 discretisation of the Caputo derivative on the Adams grid,
    // compared with g(h) - lambda h at t = 1.
    let m = ModelParams::new(0.3, 0.4, -0.65, 1.0).unwrap();
    let a = reference_arg();
    let n = 4000;
    let grid = adams_solve(&m, a, 1.0, n).unwrap();
    let alpha = m.alpha();
    let dt = grid.step();
    let mut d = Complex64::new(0.0, 0.0);
    for j in 0..n {
        let w = ((j + 1) as f64).powf(1.0 - alpha) - (j as f64).powf(1.0 - alpha);
        d += (grid.h[n - j] - grid.h[n - j - 1]) * w;
    }
    d *= dt.powf(-alpha) * reciprocal_gamma(2.0 - alpha);
    let h = grid.h[n];
    let want = g_from_h(&m, a, h) - m.lam() * h;
    assert!((d - want).norm() < 1e-3 * want.norm(), "{d} vs {want}");
}

#[test]
fn invalid_grids_are_rejected() {
    let m = ModelParams::realistic();
    assert!(matches!(adams_solve(&m, reference_arg(), 0.0, 10), Err(Error::Domain(_))));
    assert!(matches!(adams_solve(&m, reference_arg(), 1.0, 1), Err(Error::InvalidParameter(_))));
}
