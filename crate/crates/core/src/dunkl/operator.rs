//! Finite-difference Dunkl operators on symmetric grids.

use crate::axis::map_along_axis;
use crate::domain::{MeasureSpace, WeightedGrid};
use crate::error::{invalid, Error, Result};

/// Fourth-order first derivative of one grid line, one-sided at both ends.
fn derivative_line(f: &[f64], h: f64, out: &mut [f64]) {
    let n = f.len();
    let s = 1.0 / (12.0 * h);
    for i in 2..n - 2 {
        out[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) * s;
    }
    out[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) * s;
    out[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) * s;
    let m = n - 1;
    out[m] = -(-25.0 * f[m] + 48.0 * f[m - 1] - 36.0 * f[m - 2] + 16.0 * f[m - 3] - 3.0 * f[m - 4]) * s;
    out[m - 1] = -(-3.0 * f[m] - 10.0 * f[m - 1] + 18.0 * f[m - 2] - 6.0 * f[m - 3] + f[m - 4]) * s;
}

/// `d f / d x_axis` by fourth-order differences.
pub fn partial_derivative(grid: &WeightedGrid, axis: usize, f: &[f64]) -> Result<Vec<f64>> {
    check_function(grid, f)?;
    if axis >= grid.dim() {
        return Err(invalid(
            "axis",
            format!("{axis} out of range for dimension {}", grid.dim()),
        ));
    }
    let n = grid.points_per_axis();
    if n < 5 {
        return Err(invalid("grid", "at least 5 points per axis are needed"));
    }
    let h = grid.spacing();
    Ok(map_along_axis(f, n, grid.dim(), axis, n, |line, out| {
        derivative_line(line, h, out)
    }))
}

/// Dunkl operator in direction `xi`,
/// `T_xi f = sum_j xi_j (d_j f(x) + kappa_j (f(x) - f(sigma_j x)) / x_j)`,
/// where `sigma_j` flips the sign of coordinate `j`.
pub fn dunkl_operator_apply(grid: &WeightedGrid, xi: &[f64], f: &[f64]) -> Result<Vec<f64>> {
    check_function(grid, f)?;
    if xi.len() != grid.dim() {
        return Err(Error::DimensionMismatch {
            expected: grid.dim(),
            got: xi.len(),
        });
    }
    let kappas = grid.root_system().axis_kappas();
    let n = grid.points_per_axis();
    let d = grid.dim();
    let mut out = vec![0.0; f.len()];
    for (axis, (&c, &kappa)) in xi.iter().zip(&kappas).enumerate() {
        if c == 0.0 {
            continue;
        }
        let df = partial_derivative(grid, axis, f)?;
        let stride = n.pow((d - 1 - axis) as u32);
        for (i, o) in out.iter_mut().enumerate() {
            let mut v = df[i];
            if kappa != 0.0 {
                let x = grid.axis_nodes()[(i / stride) % n];
                v += kappa * (f[i] - f[grid.reflect_index(i, axis)]) / x;
            }
            *o += c * v;
        }
    }
    Ok(out)
}

/// Dunkl Laplacian `sum_j T_j^2 f` with `T_j` the operator along axis `j`.
pub fn dunkl_laplacian(grid: &WeightedGrid, f: &[f64]) -> Result<Vec<f64>> {
    let d = grid.dim();
    let mut out = vec![0.0; f.len()];
    for axis in 0..d {
        let mut e = vec![0.0; d];
        e[axis] = 1.0;
        let once = dunkl_operator_apply(grid, &e, f)?;
        let twice = dunkl_operator_apply(grid, &e, &once)?;
        for (o, v) in out.iter_mut().zip(twice) {
            *o += v;
        }
    }
    Ok(out)
}

fn check_function(grid: &WeightedGrid, f: &[f64]) -> Result<()> {
    if f.len() != grid.len() {
        return Err(Error::DimensionMismatch {
            expected: grid.len(),
            got: f.len(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::RootSystem;
    use crate::dunkl::DunklKernel;
    use num_complex::Complex64;

    fn interior_max(grid: &WeightedGrid, a: &[f64], b: &[f64], margin: f64) -> f64 {
        grid.nodes()
            .zip(a.iter().zip(b))
            .filter(|(x, _)| x.iter().all(|c| c.abs() < grid.half_width() - margin))
            .map(|(_, (u, v))| (u - v).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn kappa_zero_is_derivative() {
        let grid = WeightedGrid::rank1(0.0, 3.0, 200).unwrap();
        let f = grid.sample(|x| x[0].sin());
        let t = dunkl_operator_apply(&grid, &[1.0], &f).unwrap();
        let fd = partial_derivative(&grid, 0, &f).unwrap();
        assert_eq!(t, fd);
        let exact = grid.sample(|x| x[0].cos());
        assert!(interior_max(&grid, &t, &exact, 0.0) < 1e-6);
    }

    #[test]
    fn linear_function() {
        let grid = WeightedGrid::rank1(1.0, 2.0, 64).unwrap();
        let f = grid.sample(|x| x[0]);
        let t = dunkl_operator_apply(&grid, &[1.0], &f).unwrap();
        assert!(t.iter().all(|v| (v - 3.0).abs() < 1e-10));
    }

    #[test]
    fn even_function_sees_only_derivative() {
        let grid = WeightedGrid::rank1(0.7, 3.0, 300).unwrap();
        let f = grid.sample(|x| (-x[0] * x[0]).exp());
        let t = dunkl_operator_apply(&grid, &[1.0], &f).unwrap();
        let exact = grid.sample(|x| -2.0 * x[0] * (-x[0] * x[0]).exp());
        assert!(interior_max(&grid, &t, &exact, 0.0) < 1e-6);
    }

    #[test]
    fn kernel_is_eigenfunction() {
        for &kappa in &[0.5, 1.0, 2.0] {
            let k = DunklKernel::new(kappa).unwrap();
            let y = 1.3;
            let errs: Vec<f64> = [100, 200]
                .iter()
                .map(|&n| {
                    let grid = WeightedGrid::rank1(kappa, 2.0, n).unwrap();
                    let f = grid.sample(|x| k.eval(x[0], Complex64::new(y, 0.0)).unwrap().re);
                    let t = dunkl_operator_apply(&grid, &[1.0], &f).unwrap();
                    let yf: Vec<f64> = f.iter().map(|v| y * v).collect();
                    interior_max(&grid, &t, &yf, 0.0)
                })
                .collect();
            assert!(errs[1] < 1e-6, "kappa={kappa}: {errs:?}");
            // fourth order: halving h divides the error by about 16
            assert!(errs[0] / errs[1] > 10.0, "kappa={kappa}: {errs:?}");
        }
    }

    #[test]
    fn laplacian_of_kernel_and_constants() {
        let kappa = 0.5;
        let k = DunklKernel::new(kappa).unwrap();
        let grid = WeightedGrid::rank1(kappa, 3.0, 400).unwrap();
        let y = -0.8;
        let f = grid.sample(|x| k.eval(x[0], Complex64::new(y, 0.0)).unwrap().re);
        let lap = dunkl_laplacian(&grid, &f).unwrap();
        let y2f: Vec<f64> = f.iter().map(|v| y * y * v).collect();
        assert!(interior_max(&grid, &lap, &y2f, 0.0) < 1e-5);
        let ones = vec![1.0; grid.len()];
        assert!(dunkl_laplacian(&grid, &ones).unwrap().iter().all(|v| v.abs() < 1e-9));
    }

    #[test]
    fn operators_commute_in_two_dimensions() {
        let f_of = |x: &[f64]| (-(x[0] - 0.3).powi(2) - (x[1] + 0.2).powi(2) + 0.5 * x[0] * x[1]).exp();
        let defect = |n: usize| {
            let rs = RootSystem::product(&[0.5, 1.0]).unwrap();
            let grid = WeightedGrid::new(rs, 4.0, n).unwrap();
            let f = grid.sample(f_of);
            let t1 = dunkl_operator_apply(&grid, &[1.0, 0.0], &f).unwrap();
            let t2 = dunkl_operator_apply(&grid, &[0.0, 1.0], &f).unwrap();
            let t21 = dunkl_operator_apply(&grid, &[0.0, 1.0], &t1).unwrap();
            let t12 = dunkl_operator_apply(&grid, &[1.0, 0.0], &t2).unwrap();
            interior_max(&grid, &t12, &t21, 0.5)
        };
        let (coarse, fine) = (defect(64), defect(128));
        assert!(fine < 1e-4, "{coarse} {fine}");
    }

    #[test]
    fn laplacian_matches_classical_for_kappa_zero() {
        let rs = RootSystem::trivial(2).unwrap();
        let grid = WeightedGrid::new(rs, 4.0, 240).unwrap();
        let f = grid.sample(|x| (-(x[0] * x[0] + x[1] * x[1])).exp());
        let lap = dunkl_laplacian(&grid, &f).unwrap();
        let exact = grid.sample(|x| {
            let r2 = x[0] * x[0] + x[1] * x[1];
            (4.0 * r2 - 4.0) * (-r2).exp()
        });
        let err = interior_max(&grid, &lap, &exact, 0.5);
        assert!(err < 1e-4, "{err}");
    }

    #[test]
    fn rejects_bad_direction() {
        let grid = WeightedGrid::rank1(1.0, 2.0, 16).unwrap();
        let f = vec![0.0; 16];
        assert!(matches!(
            dunkl_operator_apply(&grid, &[1.0, 0.0], &f),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
