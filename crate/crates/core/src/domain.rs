//! Discretized measure spaces: root systems and their weights, midpoint grids,
//! finite measure spaces, and the `L^p` / `L^p(l^q)` / distribution-function
//! computations shared by every other module.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::special::hurwitz_zeta_half_negative;

/// Which sign-flip group the root system generates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RootFamily {
    Trivial,
    Rank1Z2,
    ProductZ2d,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Root {
    pub vector: Vec<f64>,
    pub multiplicity: f64,
}

/// A reduced root system of sign-flip type together with its multiplicity
/// function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootSystem {
    dim: usize,
    family: RootFamily,
    roots: Vec<Root>,
}

impl RootSystem {
    pub fn trivial(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("dimension", "must be positive"));
        }
        Ok(Self {
            dim,
            family: RootFamily::Trivial,
            roots: Vec::new(),
        })
    }

    /// `R = {+e_1, -e_1}` on the line with multiplicity `kappa`.
    pub fn rank1(kappa: f64) -> Result<Self> {
        check_multiplicity(kappa)?;
        Self::from_roots(
            1,
            RootFamily::Rank1Z2,
            vec![
                Root {
                    vector: vec![1.0],
                    multiplicity: kappa,
                },
                Root {
                    vector: vec![-1.0],
                    multiplicity: kappa,
                },
            ],
        )
    }

    /// `R = {+-e_1, ..., +-e_d}` with multiplicity `kappas[i]` on `+-e_i`.
    pub fn product(kappas: &[f64]) -> Result<Self> {
        if kappas.is_empty() {
            return Err(invalid("dimension", "must be positive"));
        }
        let dim = kappas.len();
        let mut roots = Vec::with_capacity(2 * dim);
        for (i, &k) in kappas.iter().enumerate() {
            check_multiplicity(k)?;
            for sign in [1.0, -1.0] {
                let mut vector = vec![0.0; dim];
                vector[i] = sign;
                roots.push(Root {
                    vector,
                    multiplicity: k,
                });
            }
        }
        Self::from_roots(dim, RootFamily::ProductZ2d, roots)
    }

    /// Builds a root system from an explicit list, checking `R = -R`, the
    /// symmetry of the multiplicity and the family's shape.
    pub fn from_roots(dim: usize, family: RootFamily, roots: Vec<Root>) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("dimension", "must be positive"));
        }
        for root in &roots {
            if root.vector.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: root.vector.len(),
                });
            }
            if root.vector.iter().all(|&c| c == 0.0) {
                return Err(Error::RootSystem("zero root".into()));
            }
            check_multiplicity(root.multiplicity)?;
            let neg: Vec<f64> = root.vector.iter().map(|c| -c).collect();
            match roots.iter().find(|r| r.vector == neg) {
                None => return Err(Error::RootSystem(format!("{:?} has no negative", root.vector))),
                Some(r) if r.multiplicity != root.multiplicity => {
                    return Err(Error::RootSystem(format!(
                        "multiplicity differs on {:?} and its negative",
                        root.vector
                    )))
                }
                _ => {}
            }
            if axis_of(&root.vector).is_none() {
                return Err(Error::RootSystem(format!(
                    "{:?} is not a signed unit coordinate vector",
                    root.vector
                )));
            }
        }
        match family {
            RootFamily::Trivial if !roots.is_empty() => {
                return Err(Error::RootSystem("trivial family must have no roots".into()))
            }
            RootFamily::Rank1Z2 if dim != 1 || roots.len() != 2 => {
                return Err(Error::RootSystem("rank1_Z2 is {+e1, -e1} on the line".into()))
            }
            RootFamily::ProductZ2d => {
                if roots.len() != 2 * dim {
                    return Err(Error::RootSystem(
                        "product_Z2d needs exactly +-e_i for every axis".into(),
                    ));
                }
                for i in 0..dim {
                    for sign in [1.0, -1.0] {
                        if !roots
                            .iter()
                            .any(|r| axis_of(&r.vector) == Some(i) && r.vector[i] == sign)
                        {
                            return Err(Error::RootSystem(format!("missing root {sign}e_{}", i + 1)));
                        }
                    }
                }
            }
            _ => {}
        }
        Ok(Self { dim, family, roots })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn family(&self) -> RootFamily {
        self.family
    }

    pub fn roots(&self) -> &[Root] {
        &self.roots
    }

    /// Multiplicity carried by the roots `+-e_i`, per axis.
    pub fn axis_kappas(&self) -> Vec<f64> {
        let mut kappas = vec![0.0; self.dim];
        for root in &self.roots {
            if let Some(i) = axis_of(&root.vector) {
                kappas[i] = root.multiplicity;
            }
        }
        kappas
    }

    /// `prod_{alpha in R} |<x, alpha>|^{kappa(alpha)}` with `0^0 = 1`.
    pub fn weight_at(&self, x: &[f64]) -> f64 {
        self.roots
            .iter()
            .map(|r| {
                if r.multiplicity == 0.0 {
                    1.0
                } else {
                    dot(x, &r.vector).abs().powf(r.multiplicity)
                }
            })
            .product()
    }

    /// `gamma = (1/2) sum_{alpha in R} kappa(alpha)`; the weight is homogeneous
    /// of degree `2 gamma`.
    pub fn gamma_index(&self) -> f64 {
        0.5 * self.roots.iter().map(|r| r.multiplicity).sum::<f64>()
    }

    pub fn is_trivial_weight(&self) -> bool {
        self.roots.iter().all(|r| r.multiplicity == 0.0)
    }
}

fn check_multiplicity(k: f64) -> Result<()> {
    if k.is_finite() && k >= 0.0 {
        Ok(())
    } else {
        Err(invalid("kappa", format!("{k} is not a nonnegative number")))
    }
}

fn axis_of(v: &[f64]) -> Option<usize> {
    let mut axis = None;
    for (i, &c) in v.iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        if c.abs() != 1.0 || axis.is_some() {
            return None;
        }
        axis = Some(i);
    }
    axis
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// A measure space with finitely many atoms: a quadrature grid or a finite
/// measure space.
pub trait MeasureSpace {
    /// Mass carried by each node.
    fn weights(&self) -> &[f64];

    fn len(&self) -> usize {
        self.weights().len()
    }

    fn is_empty(&self) -> bool {
        self.weights().is_empty()
    }
}

/// `n` atoms with positive masses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteMeasureSpace {
    masses: Vec<f64>,
}

impl FiniteMeasureSpace {
    pub fn new(masses: Vec<f64>) -> Result<Self> {
        if masses.is_empty() {
            return Err(invalid("masses", "space must have at least one atom"));
        }
        if let Some(m) = masses.iter().find(|m| !(m.is_finite() && **m > 0.0)) {
            return Err(invalid("masses", format!("mass {m} is not positive")));
        }
        Ok(Self { masses })
    }

    /// Counting measure on `n` points.
    pub fn counting(n: usize) -> Result<Self> {
        Self::new(vec![1.0; n])
    }
}

impl MeasureSpace for FiniteMeasureSpace {
    fn weights(&self) -> &[f64] {
        &self.masses
    }
}

/// Midpoint lattice on `[-L, L]^d` carrying the weighted measure of a root
/// system. Nodes are stored row-major with the last axis fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGrid {
    root_system: RootSystem,
    half_width: f64,
    points_per_axis: usize,
    axis_nodes: Vec<f64>,
    /// Per-axis factor `w_i(x) h` of the product weight.
    axis_weights: Vec<Vec<f64>>,
    weights: Vec<f64>,
}

impl WeightedGrid {
    pub fn new(root_system: RootSystem, half_width: f64, points_per_axis: usize) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(invalid("half_width", format!("{half_width} is not positive")));
        }
        if points_per_axis == 0 || !points_per_axis.is_multiple_of(2) {
            return Err(invalid(
                "points",
                format!("{points_per_axis} is not a positive even integer"),
            ));
        }
        let dim = root_system.dim();
        let h = 2.0 * half_width / points_per_axis as f64;
        // mirrored so that sign flips map nodes to nodes exactly
        let mut axis_nodes: Vec<f64> = (0..points_per_axis)
            .map(|j| -half_width + (j as f64 + 0.5) * h)
            .collect();
        for j in points_per_axis / 2..points_per_axis {
            axis_nodes[j] = -axis_nodes[points_per_axis - 1 - j];
        }
        let kappas = root_system.axis_kappas();
        let axis_weights: Vec<Vec<f64>> = kappas
            .iter()
            .map(|&k| axis_quadrature_weights(&axis_nodes, h, k))
            .collect();
        let total = points_per_axis.pow(dim as u32);
        let mut weights = vec![1.0; total];
        let mut idx = vec![0usize; dim];
        for w in weights.iter_mut() {
            for (axis, &j) in idx.iter().enumerate() {
                *w *= axis_weights[axis][j];
            }
            increment(&mut idx, points_per_axis);
        }
        Ok(Self {
            root_system,
            half_width,
            points_per_axis,
            axis_nodes,
            axis_weights,
            weights,
        })
    }

    /// One-dimensional grid for the rank-one system with multiplicity `kappa`
    /// (`kappa = 0` gives plain Lebesgue measure).
    pub fn rank1(kappa: f64, half_width: f64, points: usize) -> Result<Self> {
        let rs = if kappa == 0.0 {
            RootSystem::trivial(1)?
        } else {
            RootSystem::rank1(kappa)?
        };
        Self::new(rs, half_width, points)
    }

    pub fn root_system(&self) -> &RootSystem {
        &self.root_system
    }

    pub fn dim(&self) -> usize {
        self.root_system.dim()
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.points_per_axis as f64
    }

    pub fn axis_nodes(&self) -> &[f64] {
        &self.axis_nodes
    }

    pub fn axis_weights(&self, axis: usize) -> &[f64] {
        &self.axis_weights[axis]
    }

    pub fn shape(&self) -> Vec<usize> {
        vec![self.points_per_axis; self.dim()]
    }

    /// Coordinates of node `index`.
    pub fn node(&self, index: usize) -> Vec<f64> {
        let n = self.points_per_axis;
        let d = self.dim();
        let mut x = vec![0.0; d];
        let mut rest = index;
        for axis in (0..d).rev() {
            x[axis] = self.axis_nodes[rest % n];
            rest /= n;
        }
        x
    }

    pub fn nodes(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        (0..self.len()).map(move |i| self.node(i))
    }

    /// Index of the node obtained by flipping the sign of coordinate `axis`.
    pub fn reflect_index(&self, index: usize, axis: usize) -> usize {
        let n = self.points_per_axis;
        let stride = n.pow((self.dim() - 1 - axis) as u32);
        let j = (index / stride) % n;
        index - j * stride + (n - 1 - j) * stride
    }

    /// Samples `f` at every node.
    pub fn sample<F: Fn(&[f64]) -> f64>(&self, f: F) -> Vec<f64> {
        self.nodes().map(|x| f(&x)).collect()
    }

    /// Quadrature of the weight over the centred ball `{|x| <= r}`.
    pub fn ball_measure(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(invalid("radius", format!("{r} is not positive")));
        }
        if r > self.half_width {
            return Err(Error::DomainTruncation {
                radius: r,
                half_width: self.half_width,
            });
        }
        let r2 = r * r;
        Ok(self
            .nodes()
            .zip(&self.weights)
            .filter(|(x, _)| x.iter().map(|c| c * c).sum::<f64>() <= r2)
            .map(|(_, w)| w)
            .sum())
    }
}

impl MeasureSpace for WeightedGrid {
    fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// Midpoint weights `|x_j|^{2 kappa} h`, with the two nodes next to the
/// hyperplane corrected by the generalized Euler-Maclaurin term
/// `-zeta(-2 kappa, 1/2) h^{2 kappa + 1}` of the weight's kink at the origin.
/// Without it the rule is biased by `O(h^2)` for `0 < 2 kappa < 2`.
fn axis_quadrature_weights(nodes: &[f64], h: f64, kappa: f64) -> Vec<f64> {
    if kappa == 0.0 {
        return vec![h; nodes.len()];
    }
    let beta = 2.0 * kappa;
    let mut w: Vec<f64> = nodes.iter().map(|x| x.abs().powf(beta) * h).collect();
    let n = nodes.len();
    let correction = hurwitz_zeta_half_negative(beta) * h.powf(beta + 1.0);
    for j in [n / 2 - 1, n / 2] {
        if w[j] - correction > 0.0 {
            w[j] -= correction;
        }
    }
    w
}

fn increment(idx: &mut [usize], n: usize) {
    for slot in idx.iter_mut().rev() {
        *slot += 1;
        if *slot < n {
            return;
        }
        *slot = 0;
    }
}

/// Values with a modulus.
pub trait Magnitude: Copy {
    fn magnitude(self) -> f64;
}

impl Magnitude for f64 {
    fn magnitude(self) -> f64 {
        self.abs()
    }
}

impl Magnitude for Complex64 {
    fn magnitude(self) -> f64 {
        self.norm()
    }
}

/// A finite sequence of functions on one measure space: a truncated element
/// of `L^p(l^q)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VectorField {
    components: Vec<Vec<f64>>,
}

impl VectorField {
    pub fn new(components: Vec<Vec<f64>>) -> Result<Self> {
        let first = components.first().ok_or(Error::EmptyField)?;
        let n = first.len();
        if let Some(c) = components.iter().find(|c| c.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: c.len(),
            });
        }
        if components.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("vector field"));
        }
        Ok(Self { components })
    }

    pub fn components(&self) -> &[Vec<f64>] {
        &self.components
    }

    pub fn into_components(self) -> Vec<Vec<f64>> {
        self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Number of nodes each component is sampled on.
    pub fn nodes(&self) -> usize {
        self.components[0].len()
    }

    /// `x -> ||(f_n(x))_n||_{l^q}`.
    pub fn pointwise_lq(&self, q: f64) -> Result<Vec<f64>> {
        check_exponent(q)?;
        Ok((0..self.nodes())
            .map(|i| lq_of(self.components.iter().map(|c| c[i]), q))
            .collect())
    }
}

/// `l^q` norm of a finite sequence; `q = inf` is the max.
pub fn lq_of<I: IntoIterator<Item = f64>>(values: I, q: f64) -> f64 {
    if q.is_infinite() {
        values.into_iter().fold(0.0, |m, v| m.max(v.abs()))
    } else if q == 1.0 {
        values.into_iter().map(f64::abs).sum()
    } else if q == 2.0 {
        values.into_iter().map(|v| v * v).sum::<f64>().sqrt()
    } else {
        values.into_iter().map(|v| v.abs().powf(q)).sum::<f64>().powf(1.0 / q)
    }
}

fn check_exponent(p: f64) -> Result<()> {
    if p >= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidExponent(p))
    }
}

/// `(sum_j w_j |f_j|^p)^{1/p}`, or `max_j |f_j|` for `p = inf`.
pub fn lp_norm<S, T>(space: &S, f: &[T], p: f64) -> Result<f64>
where
    S: MeasureSpace + ?Sized,
    T: Magnitude,
{
    check_exponent(p)?;
    let w = space.weights();
    if f.len() != w.len() {
        return Err(Error::DimensionMismatch {
            expected: w.len(),
            got: f.len(),
        });
    }
    if p.is_infinite() {
        return Ok(f.iter().fold(0.0, |m, v| m.max(v.magnitude())));
    }
    let sum: f64 = if p == 1.0 {
        f.iter().zip(w).map(|(v, w)| w * v.magnitude()).sum()
    } else if p == 2.0 {
        f.iter().zip(w).map(|(v, w)| w * v.magnitude() * v.magnitude()).sum()
    } else {
        f.iter().zip(w).map(|(v, w)| w * v.magnitude().powf(p)).sum()
    };
    Ok(sum.powf(1.0 / p))
}

/// `|| x -> ||(f_n(x))||_{l^q} ||_{L^p}`.
pub fn lpq_norm<S>(space: &S, field: &VectorField, p: f64, q: f64) -> Result<f64>
where
    S: MeasureSpace + ?Sized,
{
    check_exponent(p)?;
    let pointwise = field.pointwise_lq(q)?;
    lp_norm(space, &pointwise, p)
}

/// `m({x : g(x) > lambda})`.
pub fn distribution<S>(space: &S, g: &[f64], lambda: f64) -> f64
where
    S: MeasureSpace + ?Sized,
{
    g.iter()
        .zip(space.weights())
        .filter(|(v, _)| **v > lambda)
        .map(|(_, w)| w)
        .sum()
}

/// `sup_{lambda > 0} lambda m({g > lambda})`, computed exactly over the finite
/// set of values of `g`: on `[v_{k+1}, v_k)` the product increases, so the
/// supremum is `max_k v_k m({g >= v_k})`.
pub fn weak_type_sup<S>(space: &S, g: &[f64]) -> f64
where
    S: MeasureSpace + ?Sized,
{
    let mut pairs: Vec<(f64, f64)> = g
        .iter()
        .zip(space.weights())
        .filter(|(v, _)| **v > 0.0)
        .map(|(v, w)| (*v, *w))
        .collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut best = 0.0f64;
    let mut mass = 0.0;
    let mut i = 0;
    while i < pairs.len() {
        let v = pairs[i].0;
        while i < pairs.len() && pairs[i].0 == v {
            mass += pairs[i].1;
            i += 1;
        }
        best = best.max(v * mass);
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn weight_examples() {
        assert_eq!(RootSystem::trivial(3).unwrap().weight_at(&[1.0, -2.0, 5.0]), 1.0);
        let rs = RootSystem::rank1(1.0).unwrap();
        assert_eq!(rs.weight_at(&[2.0]), 4.0);
        let rs = RootSystem::rank1(0.5).unwrap();
        assert_eq!(rs.weight_at(&[0.0]), 0.0);
        let rs = RootSystem::product(&[0.0, 1.0]).unwrap();
        assert_eq!(rs.weight_at(&[0.0, 3.0]), 9.0);
    }

    #[test]
    fn gamma_examples() {
        assert_eq!(RootSystem::trivial(2).unwrap().gamma_index(), 0.0);
        assert_eq!(RootSystem::rank1(1.0).unwrap().gamma_index(), 1.0);
        assert_eq!(RootSystem::product(&[0.5, 1.5]).unwrap().gamma_index(), 2.0);
    }

    #[test]
    fn root_system_invariants_are_enforced() {
        let bad = RootSystem::from_roots(
            1,
            RootFamily::Rank1Z2,
            vec![Root {
                vector: vec![1.0],
                multiplicity: 1.0,
            }],
        );
        assert!(bad.is_err());
        let asym = RootSystem::from_roots(
            1,
            RootFamily::Rank1Z2,
            vec![
                Root {
                    vector: vec![1.0],
                    multiplicity: 1.0,
                },
                Root {
                    vector: vec![-1.0],
                    multiplicity: 2.0,
                },
            ],
        );
        assert!(asym.is_err());
        assert!(RootSystem::rank1(-0.1).is_err());
        let rs = RootSystem::product(&[0.5, 1.5]).unwrap();
        assert_eq!(rs.roots().len(), 4);
        assert_eq!(rs.axis_kappas(), vec![0.5, 1.5]);
    }

    #[test]
    fn ball_measure_examples() {
        let g = WeightedGrid::rank1(0.0, 4.0, 4000).unwrap();
        assert!((g.ball_measure(1.0).unwrap() - 2.0).abs() < 2.0 * g.spacing());
        let g = WeightedGrid::rank1(1.0, 4.0, 4000).unwrap();
        assert!((g.ball_measure(1.0).unwrap() - 2.0 / 3.0).abs() < 2.0 * g.spacing());
        let g = WeightedGrid::new(RootSystem::trivial(2).unwrap(), 2.0, 400).unwrap();
        assert!((g.ball_measure(1.0).unwrap() - std::f64::consts::PI).abs() < 5.0 * g.spacing());
        assert!(matches!(g.ball_measure(2.5), Err(Error::DomainTruncation { .. })));
    }

    #[test]
    fn ball_measure_scaling_law() {
        // 2^{d + 2 gamma}
        let g = WeightedGrid::rank1(1.0, 4.0, 8000).unwrap();
        let ratio = g.ball_measure(2.0).unwrap() / g.ball_measure(1.0).unwrap();
        assert!((ratio - 8.0).abs() < 1e-2);
        let g = WeightedGrid::new(RootSystem::product(&[0.5, 0.0]).unwrap(), 4.0, 400).unwrap();
        let ratio = g.ball_measure(2.0).unwrap() / g.ball_measure(1.0).unwrap();
        assert!((ratio - 8.0).abs() < 0.1, "{ratio}");
    }

    #[test]
    fn grid_has_no_node_on_a_hyperplane() {
        let g = WeightedGrid::new(RootSystem::product(&[1.0, 0.5]).unwrap(), 3.0, 10).unwrap();
        assert!(g.nodes().all(|x| x.iter().all(|&c| c != 0.0)));
        assert!(g.weights().iter().all(|&w| w > 0.0));
        for i in 0..g.len() {
            for axis in 0..2 {
                let j = g.reflect_index(i, axis);
                let (x, y) = (g.node(i), g.node(j));
                assert_eq!(x[axis], -y[axis]);
                assert_eq!(x[1 - axis], y[1 - axis]);
                assert_eq!(g.weights()[i], g.weights()[j]);
            }
        }
    }

    #[test]
    fn lp_examples() {
        let s = FiniteMeasureSpace::new(vec![1.0, 1.0]).unwrap();
        assert_eq!(lp_norm(&s, &[-3.0, -3.0], 1.0).unwrap(), 6.0);
        let s = FiniteMeasureSpace::new(vec![3.0, 1.0]).unwrap();
        assert!((lp_norm(&s, &[1.0, 0.0], 2.0).unwrap() - 3f64.sqrt()).abs() < 1e-15);
        assert_eq!(lp_norm(&s, &[1.0, -4.0], f64::INFINITY).unwrap(), 4.0);
        assert!(matches!(lp_norm(&s, &[1.0, 0.0], 0.5), Err(Error::InvalidExponent(_))));

        let g = WeightedGrid::rank1(0.0, 12.0, 2400).unwrap();
        let f = g.sample(|x| (-0.5 * x[0] * x[0]).exp());
        let expected = std::f64::consts::PI.powf(0.25);
        assert!((lp_norm(&g, &f, 2.0).unwrap() - expected).abs() < 1e-6);
    }

    #[test]
    fn polynomial_quadrature_is_second_order() {
        // int_{-1}^{1} (1 + x + x^2) dx = 8/3; midpoint error is h^2 / 12 * [f']
        for &n in &[100usize, 200, 400] {
            let g = WeightedGrid::rank1(0.0, 1.0, n).unwrap();
            let f = g.sample(|x| 1.0 + x[0] + x[0] * x[0]);
            let h = g.spacing();
            let err = (lp_norm(&g, &f, 1.0).unwrap() - 8.0 / 3.0).abs();
            assert!(err <= 0.5 * h * h, "n={n} err={err}");
        }
    }

    #[test]
    fn lpq_examples() {
        let s = FiniteMeasureSpace::new(vec![1.0, 2.0, 0.5]).unwrap();
        let f = vec![1.0, -2.0, 0.5];
        let single = VectorField::new(vec![f.clone()]).unwrap();
        for &q in &[1.0, 1.5, 2.0, 7.0] {
            assert_eq!(lpq_norm(&s, &single, 3.0, q).unwrap(), lp_norm(&s, &f, 3.0).unwrap());
        }
        let dup = VectorField::new(vec![f.clone(), f.clone()]).unwrap();
        for &p in &[1.0, 2.5] {
            let a = lpq_norm(&s, &dup, p, 2.0).unwrap();
            let b = lpq_norm(&s, &single, p, 2.0).unwrap();
            assert!((a - 2f64.sqrt() * b).abs() < 1e-14);
        }
        // disjoint indicators, p = q: (m(A) + m(B))^{1/p}
        let chi = VectorField::new(vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 1.0]]).unwrap();
        for &p in &[1.0, 2.0, 3.0] {
            let brute: f64 = s.weights().iter().sum::<f64>().powf(1.0 / p);
            assert!((lpq_norm(&s, &chi, p, p).unwrap() - brute).abs() < 1e-14);
        }
        assert!(matches!(VectorField::new(vec![]), Err(Error::EmptyField)));
    }

    #[test]
    fn distribution_examples() {
        let s = FiniteMeasureSpace::new(vec![1.0, 2.0]).unwrap();
        assert_eq!(distribution(&s, &[1.0, 1.0], 2.0), 0.0);
        assert_eq!(distribution(&s, &[1.0, 1.0], 0.5), 3.0);
        let g = WeightedGrid::rank1(0.0, 4.0, 800).unwrap();
        let chi = g.sample(|x| if x[0].abs() <= 1.0 { 1.0 } else { 0.0 });
        assert!((distribution(&g, &chi, 0.5) - 2.0).abs() <= 2.0 * g.spacing());
    }

    #[test]
    fn weak_sup_enumerates_levels() {
        let s = FiniteMeasureSpace::counting(2).unwrap();
        assert_eq!(weak_type_sup(&s, &[1.0, 0.5]), 1.0);
        assert_eq!(weak_type_sup(&s, &[1.0, 0.75]), 1.5);
        assert_eq!(weak_type_sup(&s, &[0.0, 0.0]), 0.0);
    }

    fn finite_space_and_field() -> impl Strategy<Value = (Vec<f64>, Vec<Vec<f64>>)> {
        (1usize..6, 1usize..5).prop_flat_map(|(n, k)| {
            (
                prop::collection::vec(0.1f64..3.0, n),
                prop::collection::vec(prop::collection::vec(-5.0f64..5.0, n), k),
            )
        })
    }

    proptest! {
        #[test]
        fn lpq_is_nonincreasing_in_q((masses, comps) in finite_space_and_field(), p in 1.0f64..4.0) {
            let s = FiniteMeasureSpace::new(masses).unwrap();
            let f = VectorField::new(comps).unwrap();
            let mut prev = f64::INFINITY;
            for q in [1.0, 1.5, 2.0, 3.0, 8.0, f64::INFINITY] {
                let v = lpq_norm(&s, &f, p, q).unwrap();
                prop_assert!(v <= prev * (1.0 + 1e-12));
                prev = v;
            }
        }

        #[test]
        fn chebyshev_on_finite_spaces((masses, comps) in finite_space_and_field(), lambda in 0.01f64..4.0) {
            let s = FiniteMeasureSpace::new(masses).unwrap();
            let g: Vec<f64> = comps[0].iter().map(|v| v.abs()).collect();
            let l1 = lp_norm(&s, &g, 1.0).unwrap();
            prop_assert!(distribution(&s, &g, lambda) * lambda <= l1 * (1.0 + 1e-12));
            prop_assert!(weak_type_sup(&s, &g) <= l1 * (1.0 + 1e-12));
        }

        #[test]
        fn norms_are_invariant_under_sign_flips(a in 0.2f64..2.0, p in 1.0f64..3.0, kappa in 0.0f64..2.0) {
            let g = WeightedGrid::new(RootSystem::product(&[kappa, 0.5]).unwrap(), 2.0, 16).unwrap();
            let f = g.sample(|x| (-a * (x[0] - 0.3).powi(2) - x[1]).exp());
            for axis in 0..2 {
                let flipped: Vec<f64> = (0..g.len()).map(|i| f[g.reflect_index(i, axis)]).collect();
                let lhs = lp_norm(&g, &f, p).unwrap();
                let rhs = lp_norm(&g, &flipped, p).unwrap();
                prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs);
                prop_assert!((distribution(&g, &f, 1.0) - distribution(&g, &flipped, 1.0)).abs() <= 1e-12);
            }
        }
    }
}
