//! Maximal operators: semigroup maximal functions (scalar, vector-valued and
//! Banach-valued), Hardy-Littlewood and Fefferman-Stein operators, and the
//! two Dunkl maximal operators.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::{lq_of, MeasureSpace, VectorField, WeightedGrid};
use crate::dunkl::{DunklTransform, SpectralGrid, Transformed};
use crate::error::{invalid, Error, Result};
use crate::semigroups::{ContractionSemigroup, DunklHeatSemigroup};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SupKind {
    Radius,
    Time,
}

/// Finite set of radii or averaging times standing in for a supremum over
/// `(0, inf)`, plus an optional limit at zero (`|f|` in both cases).
///
/// Maxima over a `SupGrid` are lower bounds for the true supremum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupGrid {
    kind: SupKind,
    nodes: Vec<f64>,
    include_endpoint: bool,
}

impl SupGrid {
    /// Nodes `g_min * ratio^k` for `k = 0..=steps`.
    pub fn geometric(kind: SupKind, g_min: f64, ratio: f64, steps: usize) -> Result<Self> {
        if !(g_min > 0.0 && g_min.is_finite()) {
            return Err(invalid("g_min", format!("{g_min} is not positive")));
        }
        if !(ratio > 1.0 && ratio.is_finite()) {
            return Err(invalid("ratio", format!("{ratio} must exceed 1")));
        }
        if steps < 1 {
            return Err(invalid("steps", "at least one step is required"));
        }
        let nodes = (0..=steps).map(|k| g_min * ratio.powi(k as i32)).collect();
        Ok(Self {
            kind,
            nodes,
            include_endpoint: true,
        })
    }

    /// `count >= 2` geometric nodes from `g_min` to `g_max` inclusive.
    pub fn spanning(kind: SupKind, g_min: f64, g_max: f64, count: usize) -> Result<Self> {
        if count < 2 || !(g_max > g_min) {
            return Err(invalid(
                "sup grid",
                format!("need count >= 2 and g_max > g_min (got {count}, {g_min}, {g_max})"),
            ));
        }
        let steps = count - 1;
        let mut grid = Self::geometric(kind, g_min, (g_max / g_min).powf(1.0 / steps as f64), steps)?;
        grid.nodes[steps] = g_max;
        Ok(grid)
    }

    /// No nodes: the supremum reduces to the limit at zero, `|f|`.
    pub fn endpoint_only(kind: SupKind) -> Self {
        Self {
            kind,
            nodes: Vec::new(),
            include_endpoint: true,
        }
    }

    pub fn with_endpoint(mut self, include: bool) -> Self {
        self.include_endpoint = include;
        self
    }

    /// Inserts the geometric midpoint between neighbouring nodes; old nodes
    /// are kept bit-for-bit.
    pub fn refined(&self) -> Self {
        if self.nodes.len() < 2 {
            return self.clone();
        }
        let mut nodes = Vec::with_capacity(2 * self.nodes.len() - 1);
        for w in self.nodes.windows(2) {
            nodes.push(w[0]);
            nodes.push((w[0] * w[1]).sqrt());
        }
        nodes.push(*self.nodes.last().expect("nonempty sup grid"));
        Self { nodes, ..self.clone() }
    }

    pub fn kind(&self) -> SupKind {
        self.kind
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn includes_endpoint(&self) -> bool {
        self.include_endpoint
    }

    /// Largest node, or zero for an endpoint-only grid.
    pub fn max(&self) -> f64 {
        self.nodes.last().copied().unwrap_or(0.0)
    }

    fn expect(&self, kind: SupKind) -> Result<()> {
        if self.kind != kind {
            return Err(invalid(
                "sup grid",
                format!("expected a {kind:?} grid, got {:?}", self.kind),
            ));
        }
        Ok(())
    }
}

/// Maximal functions of a batch together with the time-quadrature error
/// estimate of the averages (zero for exact schemes).
#[derive(Debug, Clone, PartialEq)]
pub struct MaximalBatch {
    pub fields: Vec<Vec<f64>>,
    pub quadrature_error: f64,
}

/// `A_alpha f = (1/alpha) int_0^alpha T_t f dt`, `A_0 f = f`.
pub fn semigroup_average<S: ContractionSemigroup + ?Sized>(s: &S, alpha: f64, f: &[f64]) -> Result<Vec<f64>> {
    s.average(alpha, f)
}

/// `M_T f = sup_alpha |A_alpha f|` over the nodes of `sup` for every input.
pub fn semigroup_maximal_batch<S: ContractionSemigroup + ?Sized>(
    s: &S,
    fs: &[Vec<f64>],
    sup: &SupGrid,
) -> Result<MaximalBatch> {
    sup.expect(SupKind::Time)?;
    let mut fields: Vec<Vec<f64>> = if sup.include_endpoint {
        fs.iter().map(|f| f.iter().map(|v| v.abs()).collect()).collect()
    } else {
        fs.iter().map(|f| vec![0.0; f.len()]).collect()
    };
    let quadrature_error = s.for_each_average(sup.nodes(), fs, &mut |_, avgs| {
        for (m, a) in fields.iter_mut().zip(avgs) {
            for (mv, av) in m.iter_mut().zip(a) {
                *mv = mv.max(av.abs());
            }
        }
    })?;
    Ok(MaximalBatch {
        fields,
        quadrature_error,
    })
}

pub fn semigroup_maximal<S: ContractionSemigroup + ?Sized>(s: &S, f: &[f64], sup: &SupGrid) -> Result<Vec<f64>> {
    let batch = semigroup_maximal_batch(s, std::slice::from_ref(&f.to_vec()), sup)?;
    Ok(batch.fields.into_iter().next().expect("one field"))
}

/// Componentwise maximal functions `(M_T f_n)_n` and their pointwise `l^q` norm.
pub fn vector_semigroup_maximal<S: ContractionSemigroup + ?Sized>(
    s: &S,
    field: &VectorField,
    sup: &SupGrid,
    q: f64,
) -> Result<(VectorField, Vec<f64>)> {
    let batch = semigroup_maximal_batch(s, field.components(), sup)?;
    let maximal = VectorField::new(batch.fields)?;
    let norms = maximal.pointwise_lq(q)?;
    Ok((maximal, norms))
}

/// `sup_alpha || (A_alpha f_n)_n ||_{l^q}` pointwise: the norm is taken
/// before the supremum.
pub fn banach_maximal<S: ContractionSemigroup + ?Sized>(
    s: &S,
    field: &VectorField,
    sup: &SupGrid,
    q: f64,
) -> Result<Vec<f64>> {
    sup.expect(SupKind::Time)?;
    let mut out = if sup.include_endpoint {
        field.pointwise_lq(q)?
    } else {
        field.pointwise_lq(q)?;
        vec![0.0; field.nodes()]
    };
    s.for_each_average(sup.nodes(), field.components(), &mut |_, avgs| {
        for (i, o) in out.iter_mut().enumerate() {
            *o = o.max(lq_of(avgs.iter().map(|a| a[i]), q));
        }
    })?;
    Ok(out)
}

// ---------------------------------------------------------------------------
// Ball averages

/// Discrete centred ball averages of `|f|` on an unweighted grid. Values
/// outside the box count as zero; the normalization is the number of lattice
/// offsets in the ball.
fn ball_average(grid: &WeightedGrid, prefix: &[f64], r: f64) -> Vec<f64> {
    let n = grid.points_per_axis();
    let d = grid.dim();
    let rr = r / grid.spacing();
    let r2 = rr * rr * (1.0 + 1e-12);
    let m = rr.floor() as isize;
    // offsets of the first d - 1 axes inside the ball, with the half-width left
    // for the last axis
    let mut rows: Vec<(Vec<isize>, isize)> = Vec::new();
    let mut off = vec![-m; d - 1];
    loop {
        let s: f64 = off.iter().map(|&o| (o * o) as f64).sum();
        if s <= r2 {
            rows.push((off.clone(), (r2 - s).sqrt().floor() as isize));
        }
        let mut axis = d - 1;
        loop {
            if axis == 0 {
                break;
            }
            axis -= 1;
            off[axis] += 1;
            if off[axis] <= m {
                axis = usize::MAX;
                break;
            }
            off[axis] = -m;
        }
        if axis != usize::MAX {
            break;
        }
    }
    let count: f64 = rows.iter().map(|(_, w)| (2 * w + 1) as f64).sum();
    let ni = n as isize;
    (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let mut idx = vec![0isize; d];
            let mut rest = i;
            for a in (0..d).rev() {
                idx[a] = (rest % n) as isize;
                rest /= n;
            }
            let last = idx[d - 1];
            let mut total = 0.0;
            'rows: for (o, w) in &rows {
                let mut base = 0isize;
                for a in 0..d - 1 {
                    let j = idx[a] + o[a];
                    if j < 0 || j >= ni {
                        continue 'rows;
                    }
                    base = base * ni + j;
                }
                let lo = (last - w).max(0);
                let hi = (last + w).min(ni - 1);
                let row = (base * ni) as usize;
                // prefix has one extra slot per row
                let p = row + row / n;
                total += prefix[p + hi as usize + 1] - prefix[p + lo as usize];
            }
            total / count
        })
        .collect()
}

/// Prefix sums along the last axis, `n + 1` entries per line.
fn line_prefix(f_abs: &[f64], n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(f_abs.len() + f_abs.len() / n);
    for line in f_abs.chunks(n) {
        let mut acc = 0.0;
        out.push(0.0);
        for v in line {
            acc += v;
            out.push(acc);
        }
    }
    out
}

fn check_radii(grid: &WeightedGrid, rsup: &SupGrid) -> Result<()> {
    rsup.expect(SupKind::Radius)?;
    let cap = 0.5 * grid.half_width();
    if rsup.max() > cap * (1.0 + 1e-12) {
        return Err(invalid("radius", format!("{} exceeds the cap L/2 = {cap}", rsup.max())));
    }
    Ok(())
}

/// Centred Hardy-Littlewood maximal function `sup_r |B_r|^{-1} int_{B_r(x)} |f|`
/// on a `kappa = 0` grid.
pub fn hardy_littlewood(grid: &WeightedGrid, f: &[f64], rsup: &SupGrid) -> Result<Vec<f64>> {
    if !grid.root_system().is_trivial_weight() {
        return Err(invalid("grid", "Hardy-Littlewood requires kappa = 0"));
    }
    check_len(grid.len(), f.len())?;
    check_radii(grid, rsup)?;
    let f_abs: Vec<f64> = f.iter().map(|v| v.abs()).collect();
    let prefix = line_prefix(&f_abs, grid.points_per_axis());
    let mut out = if rsup.include_endpoint {
        f_abs.clone()
    } else {
        vec![0.0; f.len()]
    };
    for &r in rsup.nodes() {
        let avg = ball_average(grid, &prefix, r);
        for (o, a) in out.iter_mut().zip(avg) {
            *o = o.max(a);
        }
    }
    Ok(out)
}

/// Componentwise Hardy-Littlewood maximal functions and their `l^q` norm.
pub fn fefferman_stein(
    grid: &WeightedGrid,
    field: &VectorField,
    rsup: &SupGrid,
    q: f64,
) -> Result<(VectorField, Vec<f64>)> {
    let comps = field
        .components()
        .iter()
        .map(|f| hardy_littlewood(grid, f, rsup))
        .collect::<Result<Vec<_>>>()?;
    let maximal = VectorField::new(comps)?;
    let norms = maximal.pointwise_lq(q)?;
    Ok((maximal, norms))
}

// ---------------------------------------------------------------------------
// Dunkl maximal operators

/// Direct Dunkl maximal operator
/// `sup_r mu(B_r)^{-1} | int f(y) tau_x(chi_{B_r})(-y) dmu(y) |`, computed on
/// the transform side as `int E(i x, xi) F f(xi) F chi_{B_r}(xi) dmu(xi)`.
/// The ball transforms are computed once and shared by every input.
#[derive(Debug, Clone)]
pub struct DunklDirectMaximal<'a> {
    transform: &'a DunklTransform,
    include_endpoint: bool,
    balls: Vec<(Vec<Complex64>, f64)>,
    balls_warn: bool,
}

impl<'a> DunklDirectMaximal<'a> {
    pub fn new(transform: &'a DunklTransform, rsup: &SupGrid) -> Result<Self> {
        let grid = transform.space();
        check_radii(grid, rsup)?;
        let mut balls = Vec::with_capacity(rsup.nodes().len());
        let mut balls_warn = false;
        for &r in rsup.nodes() {
            let r2 = r * r;
            let ball = grid.sample(|x| {
                if x.iter().map(|c| c * c).sum::<f64>() <= r2 {
                    1.0
                } else {
                    0.0
                }
            });
            let fb = transform.forward(&ball)?;
            balls_warn |= fb.decay_warning;
            balls.push((fb.values, grid.ball_measure(r)?));
        }
        Ok(Self {
            transform,
            include_endpoint: rsup.includes_endpoint(),
            balls,
            balls_warn,
        })
    }

    pub fn apply(&self, f: &[f64]) -> Result<Transformed<f64>> {
        let grid = self.transform.space();
        check_len(grid.len(), f.len())?;
        let ff = self.transform.forward(f)?;
        let mut warn = ff.decay_warning || self.balls_warn;
        let mut out = if self.include_endpoint {
            f.iter().map(|v| v.abs()).collect()
        } else {
            vec![0.0; f.len()]
        };
        let scale = 1.0 / self.transform.constant();
        for (fb, measure) in &self.balls {
            let prod: Vec<Complex64> = ff.values.iter().zip(fb).map(|(a, b)| a * b).collect();
            let back = self.transform.inverse(&prod)?;
            warn |= back.decay_warning;
            for (o, v) in out.iter_mut().zip(&back.values) {
                *o = o.max((v * scale).norm() / measure);
            }
        }
        Ok(Transformed {
            values: out,
            decay_warning: warn,
        })
    }
}

pub fn dunkl_maximal_direct_with(transform: &DunklTransform, f: &[f64], rsup: &SupGrid) -> Result<Transformed<f64>> {
    DunklDirectMaximal::new(transform, rsup)?.apply(f)
}

pub fn dunkl_maximal_direct(
    grid: &WeightedGrid,
    sgrid: &SpectralGrid,
    f: &[f64],
    rsup: &SupGrid,
) -> Result<Transformed<f64>> {
    let transform = DunklTransform::new(grid.clone(), sgrid.clone())?;
    dunkl_maximal_direct_with(&transform, f, rsup)
}

/// `sup_alpha A_alpha |f|` for the Dunkl heat semigroup.
pub fn dunkl_heat_maximal(s: &DunklHeatSemigroup, f: &[f64], sup: &SupGrid) -> Result<Vec<f64>> {
    let f_abs: Vec<f64> = f.iter().map(|v| v.abs()).collect();
    semigroup_maximal(s, &f_abs, sup)
}

fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}
