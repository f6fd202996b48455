//! Dense quadrature Dunkl transform, its inverse, and the Dunkl translation
//! defined through the transform.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::axis::map_along_axis;
use crate::domain::{MeasureSpace, RootSystem, WeightedGrid};
use crate::dunkl::DunklKernel;
use crate::error::{invalid, Error, Result};
use crate::semigroups::axis_mehta_constant;

/// Boundary-to-peak ratio above which a function counts as not decaying
/// inside its box.
pub const DECAY_THRESHOLD: f64 = 1e-6;

/// Frequency-side grid of a Dunkl transform. Same root system and weights as
/// a spatial grid, possibly with a different box.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralGrid {
    grid: WeightedGrid,
}

impl SpectralGrid {
    pub fn new(root_system: RootSystem, half_width: f64, points_per_axis: usize) -> Result<Self> {
        Ok(Self {
            grid: WeightedGrid::new(root_system, half_width, points_per_axis)?,
        })
    }

    /// Frequency grid with the same box and resolution as `space`.
    pub fn mirroring(space: &WeightedGrid) -> Self {
        Self { grid: space.clone() }
    }

    pub fn grid(&self) -> &WeightedGrid {
        &self.grid
    }
}

/// Transform output with a flag raised when the input was not small on the
/// boundary of its box.
#[derive(Debug, Clone, PartialEq)]
pub struct Transformed<T> {
    pub values: Vec<T>,
    pub decay_warning: bool,
}

/// Precomputed per-axis matrices of
/// `F f(xi) = c int E(-i xi, y) f(y) dmu(y)` and of its inverse
/// `c int E(i x, xi) g(xi) dmu(xi)`.
#[derive(Debug, Clone)]
pub struct DunklTransform {
    space: WeightedGrid,
    spectral: SpectralGrid,
    kernels: Vec<DunklKernel>,
    constant: f64,
    forward: Vec<Arc<Vec<Complex64>>>,
    inverse: Vec<Arc<Vec<Complex64>>>,
}

impl DunklTransform {
    pub fn new(space: WeightedGrid, spectral: SpectralGrid) -> Result<Self> {
        let sg = spectral.grid();
        if space.root_system() != sg.root_system() {
            return Err(invalid("spectral", "root system differs from the spatial grid"));
        }
        if space.points_per_axis() != sg.points_per_axis() {
            return Err(Error::DimensionMismatch {
                expected: space.points_per_axis(),
                got: sg.points_per_axis(),
            });
        }
        let kernels = space
            .root_system()
            .axis_kappas()
            .into_iter()
            .map(DunklKernel::new)
            .collect::<Result<Vec<_>>>()?;
        let constant = (0..space.dim()).map(|a| axis_mehta_constant(&space, a)).product();
        let n = space.points_per_axis();
        let mut forward: Vec<Arc<Vec<Complex64>>> = Vec::with_capacity(space.dim());
        let mut inverse: Vec<Arc<Vec<Complex64>>> = Vec::with_capacity(space.dim());
        for (axis, kernel) in kernels.iter().enumerate() {
            // the first axis with the same kappa already holds the tables
            if let Some(prev) = kernels[..axis].iter().position(|k| k.kappa() == kernel.kappa()) {
                forward.push(forward[prev].clone());
                inverse.push(inverse[prev].clone());
                continue;
            }
            let c = axis_mehta_constant(&space, axis);
            let (xs, wx) = (space.axis_nodes(), space.axis_weights(axis));
            let (ks, wk) = (sg.axis_nodes(), sg.axis_weights(axis));
            // e[a * n + b] = E(i xi_a x_b)
            let mut e = vec![Complex64::default(); n * n];
            e.par_chunks_mut(n).enumerate().for_each(|(a, row)| {
                for (b, v) in row.iter_mut().enumerate() {
                    *v = kernel.imaginary(ks[a] * xs[b]);
                }
            });
            let mut fwd = vec![Complex64::default(); n * n];
            fwd.par_chunks_mut(n).enumerate().for_each(|(a, row)| {
                for (b, v) in row.iter_mut().enumerate() {
                    *v = e[a * n + b].conj() * (c * wx[b]);
                }
            });
            let mut inv = vec![Complex64::default(); n * n];
            inv.par_chunks_mut(n).enumerate().for_each(|(b, row)| {
                for (a, v) in row.iter_mut().enumerate() {
                    *v = e[a * n + b] * (c * wk[a]);
                }
            });
            forward.push(Arc::new(fwd));
            inverse.push(Arc::new(inv));
        }
        Ok(Self {
            space,
            spectral,
            kernels,
            constant,
            forward,
            inverse,
        })
    }

    /// Transform whose frequency grid mirrors `space`.
    pub fn on(space: &WeightedGrid) -> Result<Self> {
        Self::new(space.clone(), SpectralGrid::mirroring(space))
    }

    pub fn space(&self) -> &WeightedGrid {
        &self.space
    }

    pub fn spectral(&self) -> &SpectralGrid {
        &self.spectral
    }

    /// `c_kappa` used in both directions.
    pub fn constant(&self) -> f64 {
        self.constant
    }

    pub fn forward(&self, f: &[f64]) -> Result<Transformed<Complex64>> {
        let fc: Vec<Complex64> = f.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward_complex(&fc)
    }

    pub fn forward_complex(&self, f: &[Complex64]) -> Result<Transformed<Complex64>> {
        check_len(self.space.len(), f.len())?;
        Ok(Transformed {
            values: self.sweep(&self.forward, f),
            decay_warning: lacks_decay(&self.space, f),
        })
    }

    pub fn inverse(&self, g: &[Complex64]) -> Result<Transformed<Complex64>> {
        check_len(self.spectral.grid.len(), g.len())?;
        Ok(Transformed {
            values: self.sweep(&self.inverse, g),
            decay_warning: lacks_decay(self.spectral.grid(), g),
        })
    }

    /// `E(i x, xi)` sampled on the frequency grid.
    pub fn translation_multiplier(&self, x: &[f64]) -> Result<Vec<Complex64>> {
        if x.len() != self.space.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.space.dim(),
                got: x.len(),
            });
        }
        let sg = self.spectral.grid();
        let ks = sg.axis_nodes();
        let per_axis: Vec<Vec<Complex64>> = self
            .kernels
            .iter()
            .zip(x)
            .map(|(k, &xa)| ks.iter().map(|&xi| k.imaginary(xa * xi)).collect())
            .collect();
        let n = sg.points_per_axis();
        let d = sg.dim();
        Ok((0..sg.len())
            .map(|i| {
                let mut rest = i;
                let mut v = Complex64::new(1.0, 0.0);
                for axis in (0..d).rev() {
                    v *= per_axis[axis][rest % n];
                    rest /= n;
                }
                v
            })
            .collect())
    }

    /// Dunkl translation `tau_x f`, defined by `F(tau_x f) = E(i x, .) F f`.
    /// The result is real for real `f`; the imaginary residue is dropped.
    pub fn translate(&self, x: &[f64], f: &[f64]) -> Result<Transformed<f64>> {
        let ff = self.forward(f)?;
        let m = self.translation_multiplier(x)?;
        let prod: Vec<Complex64> = ff.values.iter().zip(&m).map(|(a, b)| a * b).collect();
        let back = self.inverse(&prod)?;
        Ok(Transformed {
            values: back.values.iter().map(|v| v.re).collect(),
            decay_warning: ff.decay_warning || back.decay_warning,
        })
    }

    fn sweep(&self, tables: &[Arc<Vec<Complex64>>], f: &[Complex64]) -> Vec<Complex64> {
        let n = self.space.points_per_axis();
        let d = self.space.dim();
        let mut cur = f.to_vec();
        for (axis, table) in tables.iter().enumerate() {
            cur = map_along_axis(&cur, n, d, axis, n, |line, out| {
                out.par_iter_mut().enumerate().for_each(|(a, o)| {
                    let row = &table[a * n..(a + 1) * n];
                    *o = row.iter().zip(line).map(|(k, v)| k * v).sum();
                });
            });
        }
        cur
    }
}

fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

/// True when the largest modulus on the box boundary exceeds
/// `DECAY_THRESHOLD` times the overall maximum.
pub fn lacks_decay<T: crate::domain::Magnitude>(grid: &WeightedGrid, f: &[T]) -> bool {
    let n = grid.points_per_axis();
    let d = grid.dim();
    let mut peak = 0.0f64;
    let mut edge = 0.0f64;
    for (i, v) in f.iter().enumerate() {
        let m = v.magnitude();
        peak = peak.max(m);
        let mut rest = i;
        let on_edge = (0..d).any(|_| {
            let j = rest % n;
            rest /= n;
            j == 0 || j == n - 1
        });
        if on_edge {
            edge = edge.max(m);
        }
    }
    edge > DECAY_THRESHOLD * peak
}

/// `F_kappa f` on `sgrid`.
pub fn dunkl_transform(grid: &WeightedGrid, sgrid: &SpectralGrid, f: &[f64]) -> Result<Transformed<Complex64>> {
    DunklTransform::new(grid.clone(), sgrid.clone())?.forward(f)
}

/// Inverse transform of `g` given on `sgrid`, evaluated on `grid`.
pub fn dunkl_inverse_transform(
    sgrid: &SpectralGrid,
    grid: &WeightedGrid,
    g: &[Complex64],
) -> Result<Transformed<Complex64>> {
    DunklTransform::new(grid.clone(), sgrid.clone())?.inverse(g)
}

/// `tau_x f` through the transform pair on `grid` and `sgrid`.
pub fn dunkl_translate(grid: &WeightedGrid, sgrid: &SpectralGrid, x: &[f64], f: &[f64]) -> Result<Transformed<f64>> {
    DunklTransform::new(grid.clone(), sgrid.clone())?.translate(x, f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::lp_norm;

    fn rel_l2(grid: &WeightedGrid, a: &[f64], b: &[f64]) -> f64 {
        let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        lp_norm(grid, &diff, 2.0).unwrap() / lp_norm(grid, b, 2.0).unwrap()
    }

    #[test]
    fn gaussian_is_fixed_for_kappa_zero() {
        let grid = WeightedGrid::rank1(0.0, 12.0, 512).unwrap();
        let t = DunklTransform::on(&grid).unwrap();
        let f = grid.sample(|x| (-0.5 * x[0] * x[0]).exp());
        let out = t.forward(&f).unwrap();
        assert!(!out.decay_warning);
        for (v, g) in out.values.iter().zip(&f) {
            assert!((v - g).norm() < 1e-4);
        }
        let back = t.inverse(&out.values).unwrap();
        for (v, g) in back.values.iter().zip(&f) {
            assert!((v - g).norm() < 1e-4);
        }
    }

    #[test]
    fn gaussian_is_fixed_for_positive_kappa() {
        // e^{-|x|^2/2} is an eigenfunction of every F_kappa with eigenvalue 1
        let grid = WeightedGrid::rank1(1.5, 12.0, 512).unwrap();
        let t = DunklTransform::on(&grid).unwrap();
        let f = grid.sample(|x| (-0.5 * x[0] * x[0]).exp());
        let out = t.forward(&f).unwrap();
        for (v, g) in out.values.iter().zip(&f) {
            assert!((v - g).norm() < 1e-4);
        }
    }

    #[test]
    fn plancherel_and_roundtrip() {
        for &kappa in &[0.0, 0.5, 1.0] {
            let grid = WeightedGrid::rank1(kappa, 12.0, 1024).unwrap();
            let t = DunklTransform::on(&grid).unwrap();
            let f = grid.sample(|x| (1.0 + x[0] - 0.3 * x[0] * x[0]) * (-(x[0] - 0.5).powi(2)).exp());
            let out = t.forward(&f).unwrap();
            let nf = lp_norm(&grid, &f, 2.0).unwrap();
            let ng = lp_norm(t.spectral().grid(), &out.values, 2.0).unwrap();
            assert!((ng / nf - 1.0).abs() < 1e-3, "kappa={kappa}: {}", ng / nf);
            let back: Vec<f64> = t.inverse(&out.values).unwrap().values.iter().map(|v| v.re).collect();
            assert!(rel_l2(&grid, &back, &f) < 1e-3);
        }
    }

    #[test]
    fn even_functions_have_real_transforms() {
        let grid = WeightedGrid::rank1(0.5, 10.0, 256).unwrap();
        let t = DunklTransform::on(&grid).unwrap();
        let f = grid.sample(|x| (-x[0] * x[0]).exp() * (1.0 + x[0] * x[0]));
        let out = t.forward(&f).unwrap();
        assert!(out.values.iter().all(|v| v.im.abs() < 1e-9));
    }

    #[test]
    fn translation_reduces_to_shift() {
        let grid = WeightedGrid::rank1(0.0, 12.0, 1024).unwrap();
        let t = DunklTransform::on(&grid).unwrap();
        let bump = |x: f64| (-(x * x)).exp() * (1.0 + 0.5 * x);
        let f = grid.sample(|x| bump(x[0]));
        let out = t.translate(&[1.5], &f).unwrap();
        let shifted = grid.sample(|x| bump(x[0] + 1.5));
        let err = out
            .values
            .iter()
            .zip(&shifted)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(err < 1e-3, "{err}");
        let same = t.translate(&[0.0], &f).unwrap();
        assert!(rel_l2(&grid, &same.values, &f) < 1e-3);
    }

    #[test]
    fn translation_is_not_positive() {
        let grid = WeightedGrid::rank1(0.5, 12.0, 1024).unwrap();
        let t = DunklTransform::on(&grid).unwrap();
        // smoothed indicator of [-1, 1]
        let f = grid.sample(|x| 0.25 * (1.0 + ((1.0 - x[0]) / 0.1).tanh()) * (1.0 + ((1.0 + x[0]) / 0.1).tanh()));
        let out = t.translate(&[2.0], &f).unwrap();
        let min = out.values.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = out.values.iter().cloned().fold(0.0, f64::max);
        assert!(min < -1e-2 * max, "min {min}, max {max}");
    }

    #[test]
    fn constants_and_non_decaying_input() {
        let grid = WeightedGrid::rank1(0.0, 6.0, 64).unwrap();
        let t = DunklTransform::on(&grid).unwrap();
        assert!(t.forward(&vec![1.0; 64]).unwrap().decay_warning);
        assert!((t.constant() - (2.0 * std::f64::consts::PI).powf(-0.5)).abs() < 1e-9);
    }

    #[test]
    fn product_transform_factorizes() {
        let rs = RootSystem::product(&[0.5, 1.0]).unwrap();
        let grid = WeightedGrid::new(rs, 8.0, 128).unwrap();
        let t = DunklTransform::on(&grid).unwrap();
        let f = grid.sample(|x| (-0.5 * (x[0] * x[0] + x[1] * x[1])).exp());
        let out = t.forward(&f).unwrap();
        let err = out
            .values
            .iter()
            .zip(&f)
            .fold(0.0f64, |m, (v, g)| m.max((v - g).norm()));
        assert!(err < 1e-4, "{err}");
    }
}
