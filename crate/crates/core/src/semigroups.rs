//! One-parameter contraction semigroups and their contract checkers.
//!
//! Four concrete instances are provided: the identity, finite-state Markov
//! semigroups `e^{tQ}`, the Euclidean heat semigroup and the Dunkl heat
//! semigroup for `Z_2^d`. Time averages `A_alpha f = (1/alpha) int_0^alpha T_t f dt`
//! are exact for Markov semigroups and use a composite Simpson rule in
//! `log t` for the kernel semigroups.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::axis::map_along_axis;
use crate::domain::{lp_norm, FiniteMeasureSpace, MeasureSpace, WeightedGrid};
use crate::dunkl::DunklKernel;
use crate::error::{invalid, Error, Result};

/// Receives `(alpha index, averages of every input function)`.
pub type AverageVisitor<'a> = dyn FnMut(usize, &[Vec<f64>]) + 'a;

/// A semigroup `(T_t)_{t >= 0}` acting on functions over a finite measure
/// space, with the L^1 / L^inf contraction contract.
pub trait ContractionSemigroup: Sync {
    /// Masses of the underlying measure space.
    fn weights(&self) -> &[f64];

    fn apply(&self, t: f64, f: &[f64]) -> Result<Vec<f64>>;

    fn apply_many(&self, t: f64, fs: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        fs.iter().map(|f| self.apply(t, f)).collect()
    }

    /// Streams `A_alpha f` for every `alpha` (ascending, `alpha = 0` allowed
    /// first) and every input `f`. Returns an estimate of the time-quadrature
    /// error (zero for exact schemes).
    fn for_each_average(&self, alphas: &[f64], fs: &[Vec<f64>], visit: &mut AverageVisitor<'_>) -> Result<f64>;

    /// `A_alpha f`, with `A_0 f = f`.
    fn average(&self, alpha: f64, f: &[f64]) -> Result<Vec<f64>> {
        if alpha < 0.0 {
            return Err(invalid("alpha", format!("{alpha} is negative")));
        }
        let mut out = Vec::new();
        self.for_each_average(&[alpha], std::slice::from_ref(&f.to_vec()), &mut |_, avg| {
            out = avg[0].clone();
        })?;
        Ok(out)
    }

    /// Whether every `T_t` is a positive operator.
    fn is_positive(&self) -> bool;
}

fn check_alphas(alphas: &[f64]) -> Result<()> {
    let mut prev = -1.0;
    for &a in alphas {
        if !(a.is_finite() && a >= 0.0) {
            return Err(invalid("alpha", format!("{a} is not a nonnegative number")));
        }
        if a <= prev {
            return Err(invalid("alpha", "averaging times must be strictly increasing"));
        }
        prev = a;
    }
    Ok(())
}

/// `T_t = I`.
#[derive(Debug, Clone)]
pub struct IdentitySemigroup {
    weights: Vec<f64>,
}

impl IdentitySemigroup {
    pub fn new<S: MeasureSpace + ?Sized>(space: &S) -> Self {
        Self {
            weights: space.weights().to_vec(),
        }
    }
}

impl ContractionSemigroup for IdentitySemigroup {
    fn weights(&self) -> &[f64] {
        &self.weights
    }

    fn apply(&self, _t: f64, f: &[f64]) -> Result<Vec<f64>> {
        Ok(f.to_vec())
    }

    fn for_each_average(&self, alphas: &[f64], fs: &[Vec<f64>], visit: &mut AverageVisitor<'_>) -> Result<f64> {
        check_alphas(alphas)?;
        for k in 0..alphas.len() {
            visit(k, fs);
        }
        Ok(0.0)
    }

    fn is_positive(&self) -> bool {
        true
    }
}

// ---------------------------------------------------------------------------
// Finite Markov semigroups

/// Generator `Q` of a doubly substochastic Markov semigroup: nonnegative
/// off-diagonal entries, row and column sums `<= 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarkovGenerator {
    n: usize,
    /// Row-major entries.
    entries: Vec<f64>,
}

/// Slack allowed on row and column sums for rounding in user-supplied matrices.
const GENERATOR_SLACK: f64 = 1e-12;

impl MarkovGenerator {
    pub fn new(n: usize, entries: Vec<f64>) -> Result<Self> {
        if n == 0 || entries.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                got: entries.len(),
            });
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("markov generator"));
        }
        for i in 0..n {
            for j in 0..n {
                if i != j && entries[i * n + j] < 0.0 {
                    return Err(invalid(
                        "generator",
                        format!("off-diagonal entry ({i},{j}) is negative"),
                    ));
                }
            }
            let row: f64 = (0..n).map(|j| entries[i * n + j]).sum();
            let col: f64 = (0..n).map(|j| entries[j * n + i]).sum();
            let scale = entries[i * n + i].abs().max(1.0);
            if row > GENERATOR_SLACK * scale {
                return Err(invalid("generator", format!("row {i} sums to {row} > 0")));
            }
            if col > GENERATOR_SLACK * scale {
                return Err(invalid("generator", format!("column {i} sums to {col} > 0")));
            }
        }
        Ok(Self { n, entries })
    }

    /// The zero generator (identity semigroup).
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            entries: vec![0.0; n * n],
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.n, self.n, &self.entries)
    }
}

/// `e^A` by scaling and squaring of the Taylor series.
pub fn expm(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let norm = one_norm(a);
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a / 2f64.powi(squarings);
    let mut sum = DMatrix::<f64>::identity(n, n);
    let mut term = DMatrix::<f64>::identity(n, n);
    for k in 1..40 {
        term = &term * &scaled / k as f64;
        sum += &term;
        if one_norm(&term) <= 1e-18 * one_norm(&sum) {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

fn one_norm(a: &DMatrix<f64>) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `int_0^alpha e^{tQ} dt = alpha phi_1(alpha Q)`, read off the top-right
/// block of `exp([[alpha Q, alpha I], [0, 0]])`. No inverse of `Q` is needed.
pub fn integrated_exponential(q: &DMatrix<f64>, alpha: f64) -> DMatrix<f64> {
    let n = q.nrows();
    let mut aug = DMatrix::<f64>::zeros(2 * n, 2 * n);
    aug.view_mut((0, 0), (n, n)).copy_from(&(q * alpha));
    for i in 0..n {
        aug[(i, n + i)] = alpha;
    }
    let e = expm(&aug);
    e.view((0, n), (n, n)).into_owned()
}

fn check_vector(n: usize, f: &[f64]) -> Result<()> {
    if f.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: f.len(),
        });
    }
    if f.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("input vector"));
    }
    Ok(())
}

fn mat_vec(m: &DMatrix<f64>, f: &[f64]) -> Vec<f64> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)] * f[j]).sum())
        .collect()
}

/// `e^{tQ} f`.
pub fn markov_apply(q: &MarkovGenerator, t: f64, f: &[f64]) -> Result<Vec<f64>> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(invalid("t", format!("{t} is not a nonnegative number")));
    }
    check_vector(q.size(), f)?;
    Ok(mat_vec(&expm(&(q.matrix() * t)), f))
}

/// `int_0^alpha e^{tQ} f dt`.
pub fn markov_integral(q: &MarkovGenerator, alpha: f64, f: &[f64]) -> Result<Vec<f64>> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(invalid("alpha", format!("{alpha} must be positive")));
    }
    check_vector(q.size(), f)?;
    Ok(mat_vec(&integrated_exponential(&q.matrix(), alpha), f))
}

/// `e^{tQ}` on a finite space with counting measure.
#[derive(Debug, Clone)]
pub struct MarkovSemigroup {
    generator: MarkovGenerator,
    space: FiniteMeasureSpace,
}

impl MarkovSemigroup {
    pub fn new(generator: MarkovGenerator) -> Self {
        let space = FiniteMeasureSpace::counting(generator.size()).expect("generator size is positive");
        Self { generator, space }
    }

    pub fn generator(&self) -> &MarkovGenerator {
        &self.generator
    }

    pub fn space(&self) -> &FiniteMeasureSpace {
        &self.space
    }
}

impl ContractionSemigroup for MarkovSemigroup {
    fn weights(&self) -> &[f64] {
        self.space.weights()
    }

    fn apply(&self, t: f64, f: &[f64]) -> Result<Vec<f64>> {
        markov_apply(&self.generator, t, f)
    }

    fn for_each_average(&self, alphas: &[f64], fs: &[Vec<f64>], visit: &mut AverageVisitor<'_>) -> Result<f64> {
        check_alphas(alphas)?;
        for f in fs {
            check_vector(self.generator.size(), f)?;
        }
        let q = self.generator.matrix();
        for (k, &alpha) in alphas.iter().enumerate() {
            if alpha == 0.0 {
                visit(k, fs);
                continue;
            }
            let m = integrated_exponential(&q, alpha) / alpha;
            let avgs: Vec<Vec<f64>> = fs.iter().map(|f| mat_vec(&m, f)).collect();
            visit(k, &avgs);
        }
        Ok(0.0)
    }

    fn is_positive(&self) -> bool {
        true
    }
}

// ---------------------------------------------------------------------------
// Kernel semigroups on grids

/// Ratio `sqrt(t) / L` above which heat leaks out of the box.
pub const TRUNCATION_RATIO: f64 = 0.25;

fn check_time(grid: &WeightedGrid, t: f64) -> Result<()> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(invalid("t", format!("{t} is not a nonnegative number")));
    }
    let limit = TRUNCATION_RATIO * grid.half_width();
    if t.sqrt() > limit {
        return Err(Error::HeatTruncation { t, limit });
    }
    Ok(())
}

/// Smallest time whose heat kernel (width `sqrt(2t)` equal to the spacing) is
/// resolved by the grid's midpoint quadrature.
pub fn resolved_time(grid: &WeightedGrid) -> f64 {
    0.5 * grid.spacing() * grid.spacing()
}

/// Dense per-axis kernel matrix applied along every axis of a tensor grid.
fn apply_separable(grid: &WeightedGrid, tables: &[Arc<Vec<f64>>], f: &[f64]) -> Vec<f64> {
    let n = grid.points_per_axis();
    let d = grid.dim();
    let mut cur = f.to_vec();
    for (axis, table) in tables.iter().enumerate() {
        cur = map_along_axis(&cur, n, d, axis, n, |line, out| {
            for (a, o) in out.iter_mut().enumerate() {
                let row = &table[a * n..(a + 1) * n];
                *o = row.iter().zip(line).map(|(k, v)| k * v).sum();
            }
        });
    }
    cur
}

/// Rescales a weighted kernel table `K(a, b) w_b` with symmetric `K` to
/// `K(a, b) w_b / max(1, m_a, m_b)`, where `m_a` is the row mass. The result
/// stays symmetric in `K`, and every row and weighted column sums to at most
/// one, so the discrete operator is an exact L1 and L-infinity contraction.
/// Only rows whose quadrature mass overshoots are touched.
fn make_substochastic(table: &mut [f64], n: usize) {
    let mass: Vec<f64> = table.chunks(n).map(|row| row.iter().sum::<f64>().max(1.0)).collect();
    if mass.iter().all(|&m| m == 1.0) {
        return;
    }
    table.par_chunks_mut(n).enumerate().for_each(|(a, row)| {
        for (b, v) in row.iter_mut().enumerate() {
            *v /= mass[a].max(mass[b]);
        }
    });
}

fn apply_separable_many(grid: &WeightedGrid, tables: &[Arc<Vec<f64>>], fs: &[Vec<f64>]) -> Vec<Vec<f64>> {
    fs.par_iter().map(|f| apply_separable(grid, tables, f)).collect()
}

/// Streams time averages of a kernel semigroup whose `T_t` for a batch is
/// produced by `step`. `[0, alpha_0]` uses the trapezoid with the exact
/// endpoint `T_0 f = f`; later panels use Simpson's rule in `u = log t` with
/// `substeps` subintervals. The returned error estimate is the largest gap
/// between the Simpson and trapezoid averages.
fn stream_time_averages<F>(
    alphas: &[f64],
    fs: &[Vec<f64>],
    substeps: usize,
    visit: &mut AverageVisitor<'_>,
    mut step: F,
) -> Result<f64>
where
    F: FnMut(f64) -> Result<Vec<Vec<f64>>>,
{
    check_alphas(alphas)?;
    let m = substeps.max(2) + substeps % 2;
    let mut start = 0;
    if alphas.first() == Some(&0.0) {
        visit(0, fs);
        start = 1;
    }
    if start == alphas.len() {
        return Ok(0.0);
    }
    let a0 = alphas[start];
    let mut prev = step(a0)?;
    let mut simpson: Vec<Vec<f64>> = fs
        .iter()
        .zip(&prev)
        .map(|(f, p)| f.iter().zip(p).map(|(a, b)| 0.5 * a0 * (a + b)).collect())
        .collect();
    let mut trapezoid = simpson.clone();
    let emit = |k: usize, acc: &[Vec<f64>], alpha: f64, visit: &mut AverageVisitor<'_>| {
        let avgs: Vec<Vec<f64>> = acc.iter().map(|v| v.iter().map(|x| x / alpha).collect()).collect();
        visit(k, &avgs);
    };
    emit(start, &simpson, a0, visit);
    let mut err = 0.0f64;
    for k in start..alphas.len() - 1 {
        let (lo, hi) = (alphas[k], alphas[k + 1]);
        let du = (hi / lo).ln() / m as f64;
        let mut t_prev = lo;
        for j in 1..=m {
            let t = if j == m { hi } else { lo * (du * j as f64).exp() };
            let cur = step(t)?;
            let ws_prev = if j == 1 {
                1.0
            } else if j % 2 == 0 {
                4.0
            } else {
                2.0
            };
            let ws_cur = if j == m { 1.0 } else { 0.0 };
            // Simpson: weight (du/3) * w_j * e^{u_j} on each node, split so that
            // every node is added exactly once
            for (((acc, tr), p), c) in simpson.iter_mut().zip(trapezoid.iter_mut()).zip(&prev).zip(&cur) {
                for i in 0..acc.len() {
                    acc[i] += du / 3.0 * (ws_prev * t_prev * p[i] + ws_cur * t * c[i]);
                    tr[i] += 0.5 * (t - t_prev) * (p[i] + c[i]);
                }
            }
            prev = cur;
            t_prev = t;
        }
        for (s, tr) in simpson.iter().zip(&trapezoid) {
            for (a, b) in s.iter().zip(tr) {
                err = err.max((a - b).abs() / hi);
            }
        }
        emit(k + 1, &simpson, hi, visit);
    }
    Ok(err)
}

/// Default number of Simpson subintervals between consecutive averaging times.
pub const DEFAULT_SUBSTEPS: usize = 2;

/// Euclidean heat semigroup `e^{t Delta}` on a `kappa = 0` grid.
#[derive(Debug, Clone)]
pub struct EuclideanHeat {
    grid: WeightedGrid,
    substeps: usize,
}

impl EuclideanHeat {
    pub fn new(grid: WeightedGrid) -> Result<Self> {
        if !grid.root_system().is_trivial_weight() {
            return Err(invalid("grid", "Euclidean heat requires kappa = 0"));
        }
        Ok(Self {
            grid,
            substeps: DEFAULT_SUBSTEPS,
        })
    }

    pub fn grid(&self) -> &WeightedGrid {
        &self.grid
    }

    fn table(&self, t: f64) -> Arc<Vec<f64>> {
        let nodes = self.grid.axis_nodes();
        let h = self.grid.spacing();
        let n = nodes.len();
        let norm = (4.0 * std::f64::consts::PI * t).powf(-0.5);
        let mut table = vec![0.0; n * n];
        table.par_chunks_mut(n).enumerate().for_each(|(a, row)| {
            for (b, v) in row.iter_mut().enumerate() {
                let d = nodes[a] - nodes[b];
                *v = norm * (-d * d / (4.0 * t)).exp() * h;
            }
        });
        make_substochastic(&mut table, n);
        Arc::new(table)
    }

    fn tables(&self, t: f64) -> Vec<Arc<Vec<f64>>> {
        let table = self.table(t);
        vec![table; self.grid.dim()]
    }
}

/// `(4 pi t)^{-d/2} int e^{-|x - y|^2 / 4t} f(y) dy` by quadrature on a
/// `kappa = 0` grid.
pub fn heat_apply(grid: &WeightedGrid, t: f64, f: &[f64]) -> Result<Vec<f64>> {
    EuclideanHeat::new(grid.clone())?.apply(t, f)
}

impl ContractionSemigroup for EuclideanHeat {
    fn weights(&self) -> &[f64] {
        self.grid.weights()
    }

    fn apply(&self, t: f64, f: &[f64]) -> Result<Vec<f64>> {
        check_vector(self.grid.len(), f)?;
        check_time(&self.grid, t)?;
        if t == 0.0 {
            return Ok(f.to_vec());
        }
        Ok(apply_separable(&self.grid, &self.tables(t), f))
    }

    fn apply_many(&self, t: f64, fs: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        for f in fs {
            check_vector(self.grid.len(), f)?;
        }
        check_time(&self.grid, t)?;
        if t == 0.0 {
            return Ok(fs.to_vec());
        }
        Ok(apply_separable_many(&self.grid, &self.tables(t), fs))
    }

    fn for_each_average(&self, alphas: &[f64], fs: &[Vec<f64>], visit: &mut AverageVisitor<'_>) -> Result<f64> {
        stream_time_averages(alphas, fs, self.substeps, visit, |t| self.apply_many(t, fs))
    }

    fn is_positive(&self) -> bool {
        true
    }
}

/// `c_kappa = (int e^{-|u|^2 / 2} d mu_kappa(u))^{-1}` by quadrature.
pub fn mehta_constant(grid: &WeightedGrid) -> f64 {
    (0..grid.dim()).map(|axis| axis_mehta_constant(grid, axis)).product()
}

pub(crate) fn axis_mehta_constant(grid: &WeightedGrid, axis: usize) -> f64 {
    let s: f64 = grid
        .axis_nodes()
        .iter()
        .zip(grid.axis_weights(axis))
        .map(|(x, w)| (-0.5 * x * x).exp() * w)
        .sum();
    1.0 / s
}

/// Bytes of kernel tables kept between calls.
const TABLE_CACHE_BUDGET: usize = 64 << 20;

/// Dunkl heat semigroup for `Z_2^d` with kernel
/// `Q(x, y, t) = c / (2t)^{d/2 + gamma} e^{-(|x|^2 + |y|^2) / 4t} E(x / sqrt(2t), y / sqrt(2t))`,
/// which factorizes over the axes.
#[derive(Debug)]
pub struct DunklHeatSemigroup {
    grid: WeightedGrid,
    kernels: Vec<DunklKernel>,
    axis_constants: Vec<f64>,
    substeps: usize,
    cache: Mutex<TableCache>,
}

#[derive(Debug, Default)]
struct TableCache {
    tables: HashMap<(u64, u64), Arc<Vec<f64>>>,
    bytes: usize,
}

impl DunklHeatSemigroup {
    pub fn new(grid: WeightedGrid) -> Result<Self> {
        let kernels = grid
            .root_system()
            .axis_kappas()
            .into_iter()
            .map(DunklKernel::new)
            .collect::<Result<Vec<_>>>()?;
        let axis_constants = (0..grid.dim()).map(|a| axis_mehta_constant(&grid, a)).collect();
        Ok(Self {
            grid,
            kernels,
            axis_constants,
            substeps: DEFAULT_SUBSTEPS,
            cache: Mutex::new(TableCache::default()),
        })
    }

    pub fn grid(&self) -> &WeightedGrid {
        &self.grid
    }

    /// `c_kappa` used by the kernel.
    pub fn mehta_constant(&self) -> f64 {
        self.axis_constants.iter().product()
    }

    /// `Q(x, y, t)` for one axis.
    pub fn axis_kernel(&self, axis: usize, x: f64, y: f64, t: f64) -> f64 {
        let kernel = &self.kernels[axis];
        let kappa = kernel.kappa();
        let z = x * y / (2.0 * t);
        let gauss = -(x.abs() - y.abs()).powi(2) / (4.0 * t);
        self.axis_constants[axis] / (2.0 * t).powf(0.5 + kappa) * gauss.exp() * kernel.scaled_real(z)
    }

    /// `Q(x, y, t)` for points of the grid's dimension.
    pub fn kernel(&self, x: &[f64], y: &[f64], t: f64) -> f64 {
        (0..self.grid.dim())
            .map(|a| self.axis_kernel(a, x[a], y[a], t))
            .product()
    }

    fn table(&self, axis: usize, t: f64) -> Arc<Vec<f64>> {
        let key = (self.kernels[axis].kappa().to_bits(), t.to_bits());
        if let Some(table) = self.cache.lock().expect("cache lock").tables.get(&key) {
            return table.clone();
        }
        let nodes = self.grid.axis_nodes();
        let weights = self.grid.axis_weights(axis);
        let n = nodes.len();
        let mut table = vec![0.0; n * n];
        table.par_chunks_mut(n).enumerate().for_each(|(a, row)| {
            for (b, v) in row.iter_mut().enumerate() {
                *v = self.axis_kernel(axis, nodes[a], nodes[b], t) * weights[b];
            }
        });
        make_substochastic(&mut table, n);
        let table = Arc::new(table);
        let mut cache = self.cache.lock().expect("cache lock");
        let size = n * n * std::mem::size_of::<f64>();
        if cache.bytes + size <= TABLE_CACHE_BUDGET {
            cache.bytes += size;
            cache.tables.insert(key, table.clone());
        }
        table
    }

    fn tables(&self, t: f64) -> Vec<Arc<Vec<f64>>> {
        (0..self.grid.dim()).map(|a| self.table(a, t)).collect()
    }

    /// Drops every cached kernel table.
    pub fn clear_cache(&self) {
        let mut cache = self.cache.lock().expect("cache lock");
        cache.tables.clear();
        cache.bytes = 0;
    }
}

impl ContractionSemigroup for DunklHeatSemigroup {
    fn weights(&self) -> &[f64] {
        self.grid.weights()
    }

    fn apply(&self, t: f64, f: &[f64]) -> Result<Vec<f64>> {
        check_vector(self.grid.len(), f)?;
        check_time(&self.grid, t)?;
        if t == 0.0 {
            return Ok(f.to_vec());
        }
        Ok(apply_separable(&self.grid, &self.tables(t), f))
    }

    fn apply_many(&self, t: f64, fs: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        for f in fs {
            check_vector(self.grid.len(), f)?;
        }
        check_time(&self.grid, t)?;
        if t == 0.0 {
            return Ok(fs.to_vec());
        }
        Ok(apply_separable_many(&self.grid, &self.tables(t), fs))
    }

    fn for_each_average(&self, alphas: &[f64], fs: &[Vec<f64>], visit: &mut AverageVisitor<'_>) -> Result<f64> {
        stream_time_averages(alphas, fs, self.substeps, visit, |t| self.apply_many(t, fs))
    }

    fn is_positive(&self) -> bool {
        true
    }
}

/// `H_t f` for the Dunkl heat semigroup.
pub fn dunkl_heat_apply(semigroup: &DunklHeatSemigroup, t: f64, f: &[f64]) -> Result<Vec<f64>> {
    semigroup.apply(t, f)
}

// ---------------------------------------------------------------------------
// Contract checkers

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContractionCheck {
    pub max_l1_ratio: f64,
    pub max_linf_ratio: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Largest `||T_t f||_1 / ||f||_1` and `||T_t f||_inf / ||f||_inf` over the samples.
pub fn check_contraction<S: ContractionSemigroup + ?Sized>(
    semigroup: &S,
    times: &[f64],
    fs: &[Vec<f64>],
    tolerance: f64,
) -> Result<ContractionCheck> {
    if times.is_empty() || fs.is_empty() {
        return Err(invalid("samples", "need at least one time and one function"));
    }
    let space = WeightSpace(semigroup.weights());
    let mut l1 = 0.0f64;
    let mut linf = 0.0f64;
    for &t in times {
        let out = semigroup.apply_many(t, fs)?;
        for (f, g) in fs.iter().zip(&out) {
            let (f1, fi) = (lp_norm(&space, f, 1.0)?, lp_norm(&space, f, f64::INFINITY)?);
            if f1 > 0.0 {
                l1 = l1.max(lp_norm(&space, g, 1.0)? / f1);
            }
            if fi > 0.0 {
                linf = linf.max(lp_norm(&space, g, f64::INFINITY)? / fi);
            }
        }
    }
    Ok(ContractionCheck {
        max_l1_ratio: l1,
        max_linf_ratio: linf,
        tolerance,
        pass: l1 <= 1.0 + tolerance && linf <= 1.0 + tolerance,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PositivityCheck {
    pub min_value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// `T_t f >= -tolerance` for every sampled nonnegative `f`.
pub fn check_positivity<S: ContractionSemigroup + ?Sized>(
    semigroup: &S,
    times: &[f64],
    fs: &[Vec<f64>],
    tolerance: f64,
) -> Result<PositivityCheck> {
    if times.is_empty() || fs.is_empty() {
        return Err(invalid("samples", "need at least one time and one function"));
    }
    if fs.iter().flatten().any(|&v| v < 0.0) {
        return Err(invalid("samples", "positivity is checked on nonnegative functions"));
    }
    let mut min = f64::INFINITY;
    for &t in times {
        for g in semigroup.apply_many(t, fs)? {
            min = g.iter().copied().fold(min, f64::min);
        }
    }
    Ok(PositivityCheck {
        min_value: min,
        tolerance,
        pass: min >= -tolerance,
    })
}

/// Largest `||T_t T_s f - T_{t+s} f||_2 / ||f||_2` over the sampled pairs.
pub fn semigroup_law_defect<S: ContractionSemigroup + ?Sized>(
    semigroup: &S,
    pairs: &[(f64, f64)],
    fs: &[Vec<f64>],
) -> Result<f64> {
    let space = WeightSpace(semigroup.weights());
    let mut worst = 0.0f64;
    for &(s, t) in pairs {
        let once = semigroup.apply_many(s, fs)?;
        let twice = semigroup.apply_many(t, &once)?;
        let joint = semigroup.apply_many(s + t, fs)?;
        for ((f, a), b) in fs.iter().zip(&twice).zip(&joint) {
            let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
            let norm = lp_norm(&space, f, 2.0)?;
            if norm > 0.0 {
                worst = worst.max(lp_norm(&space, &diff, 2.0)? / norm);
            }
        }
    }
    Ok(worst)
}

/// Borrowed weights viewed as a measure space.
#[derive(Debug, Clone, Copy)]
pub struct WeightSpace<'a>(pub &'a [f64]);

impl MeasureSpace for WeightSpace<'_> {
    fn weights(&self) -> &[f64] {
        self.0
    }
}
