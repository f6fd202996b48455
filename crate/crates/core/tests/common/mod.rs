//! Oracles shared by the integration tests.

/// `e' = y o`, `o' = y e - 2 kappa o / x`, started from the power series at a
/// small `x0` to step over the regular singular point.
pub fn kernel_by_ode(kappa: f64, x: f64, y: f64, steps: usize) -> f64 {
    let x0 = 1e-3 * x.signum();
    let a = 2.0 * kappa + 1.0;
    let z = x0 * y;
    let mut e = 1.0 + z * z / (2.0 * a) + z.powi(4) / (8.0 * a * (a + 2.0));
    let mut o = z / a + z.powi(3) / (2.0 * a * (a + 2.0));
    let rhs = |t: f64, e: f64, o: f64| (y * o, y * e - 2.0 * kappa * o / t);
    let h = (x - x0) / steps as f64;
    let mut t = x0;
    for _ in 0..steps {
        let k1 = rhs(t, e, o);
        let k2 = rhs(t + 0.5 * h, e + 0.5 * h * k1.0, o + 0.5 * h * k1.1);
        let k3 = rhs(t + 0.5 * h, e + 0.5 * h * k2.0, o + 0.5 * h * k2.1);
        let k4 = rhs(t + h, e + h * k3.0, o + h * k3.1);
        e += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        o += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
        t += h;
    }
    e + o
}
