//! Independent oracle for the rank-one Dunkl kernel: integrate the eigenvalue
//! equation `T_x E = y E` as a first-order system in the even and odd parts.

mod common;

use common::kernel_by_ode;
use maxlab::dunkl::DunklKernel;
use num_complex::Complex64;

#[test]
fn ode_oracle_reproduces_known_closed_forms() {
    assert!((kernel_by_ode(1.0, 1.0, 1.0, 20_000) - 1f64.cosh()).abs() < 1e-10);
    assert!((kernel_by_ode(0.0, 1.5, -0.7, 20_000) - (-1.05f64).exp()).abs() < 1e-10);
}

#[test]
fn kernel_matches_ode_oracle() {
    for &(kappa, x, y) in &[
        (1.0, 1.0, 1.0),
        (0.5, 2.0, -1.3),
        (0.25, -1.7, 0.9),
        (2.0, 3.0, 1.1),
        (1.5, -0.4, -2.5),
    ] {
        let k = DunklKernel::new(kappa).unwrap();
        let got = k.eval(x, Complex64::new(y, 0.0)).unwrap().re;
        let want = kernel_by_ode(kappa, x, y, 40_000);
        assert!(
            (got - want).abs() <= 1e-9 * want.abs().max(1.0),
            "kappa={kappa} x={x} y={y}: {got} vs {want}"
        );
    }
}
