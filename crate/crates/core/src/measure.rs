//! Measures as leaf atoms with cached per-cube totals, simple functions at
//! leaf resolution, and the weighted integral calculus built on them:
//! integrals, L^p norms, averages and the dyadic maximal operator.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tree::{CubeId, DyadicTree};

/// Nonnegative mass per leaf, with sigma(Q) cached for every cube.
///
/// The cache is built bottom-up summing children left to right, so
/// additivity `sigma(Q) = sum over children` holds bit-for-bit.
#[derive(Debug, Clone)]
pub struct Measure {
    leaf_mass: Vec<f64>,
    cube_mass: Vec<f64>,
}

impl Measure {
    pub fn from_leaf_masses(tree: &DyadicTree, leaf_mass: Vec<f64>) -> Result<Self> {
        if leaf_mass.len() != tree.leaf_count() {
            return Err(Error::Mismatch(format!(
                "measure has {} leaf masses, tree has {} leaves",
                leaf_mass.len(),
                tree.leaf_count()
            )));
        }
        if let Some(bad) = leaf_mass.iter().find(|m| !m.is_finite() || **m < 0.0) {
            return Err(Error::InvalidValue(format!(
                "leaf mass {bad} is not a finite nonnegative number"
            )));
        }
        let mut cube_mass = vec![0.0; tree.cube_count()];
        for (i, &m) in leaf_mass.iter().enumerate() {
            cube_mass[tree.leaf_cube(i).index()] = m;
        }
        for id in (0..tree.cube_count() - tree.leaf_count()).rev() {
            let q = CubeId(id);
            cube_mass[id] = tree.child_ids(q).map(|c| cube_mass[c.index()]).sum();
        }
        Ok(Self {
            leaf_mass,
            cube_mass,
        })
    }

    pub fn uniform(tree: &DyadicTree, mass_per_leaf: f64) -> Result<Self> {
        Self::from_leaf_masses(tree, vec![mass_per_leaf; tree.leaf_count()])
    }

    /// sigma(Q).
    pub fn of(&self, q: CubeId) -> f64 {
        self.cube_mass[q.index()]
    }

    pub fn total(&self) -> f64 {
        self.cube_mass[0]
    }

    pub fn leaf(&self, leaf_index: usize) -> f64 {
        self.leaf_mass[leaf_index]
    }

    pub fn leaf_masses(&self) -> &[f64] {
        &self.leaf_mass
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self {
            leaf_mass: self.leaf_mass.iter().map(|m| m * t).collect(),
            cube_mass: self.cube_mass.iter().map(|m| m * t).collect(),
        }
    }
}

/// Real value per leaf: a sigma-measurable simple function at tree resolution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    values: Vec<f64>,
}

impl GridFunction {
    pub fn from_values(tree: &DyadicTree, values: Vec<f64>) -> Result<Self> {
        if values.len() != tree.leaf_count() {
            return Err(Error::Mismatch(format!(
                "function has {} values, tree has {} leaves",
                values.len(),
                tree.leaf_count()
            )));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidValue(format!("function value {bad} is not finite")));
        }
        Ok(Self { values })
    }

    pub fn constant(tree: &DyadicTree, c: f64) -> Self {
        Self {
            values: vec![c; tree.leaf_count()],
        }
    }

    pub fn zero(tree: &DyadicTree) -> Self {
        Self::constant(tree, 0.0)
    }

    /// Indicator 1_Q.
    pub fn indicator(tree: &DyadicTree, q: CubeId) -> Self {
        let mut values = vec![0.0; tree.leaf_count()];
        for i in tree.leaf_span(q) {
            values[i] = 1.0;
        }
        Self { values }
    }

    pub fn get(&self, leaf_index: usize) -> f64 {
        self.values[leaf_index]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| v * t).collect(),
        }
    }

    pub fn abs(&self) -> Self {
        Self {
            values: self.values.iter().map(|v| v.abs()).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.len(), other.len());
        Self {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.len(), other.len());
        Self {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a * b)
                .collect(),
        }
    }

    pub(crate) fn from_raw(values: Vec<f64>) -> Self {
        Self { values }
    }
}

/// Integral of f over Q against sigma: the sum over leaves below Q in leaf
/// order.
pub fn integrate(tree: &DyadicTree, f: &GridFunction, sigma: &Measure, q: CubeId) -> f64 {
    tree.leaf_span(q)
        .map(|i| f.get(i) * sigma.leaf(i))
        .sum()
}

/// Per-cube integrals of f against sigma, computed bottom-up (children summed
/// left to right). `out[q] = integral of f over q`.
pub fn cube_integrals(tree: &DyadicTree, f: &GridFunction, sigma: &Measure) -> Vec<f64> {
    let mut out = vec![0.0; tree.cube_count()];
    let leaf_start = tree.cube_count() - tree.leaf_count();
    for i in 0..tree.leaf_count() {
        out[leaf_start + i] = f.get(i) * sigma.leaf(i);
    }
    for id in (0..leaf_start).rev() {
        out[id] = tree.child_ids(CubeId(id)).map(|c| out[c.index()]).sum();
    }
    out
}

/// (sum |f|^p sigma)^{1/p} over the whole tree, p > 0.
pub fn lp_norm(f: &GridFunction, sigma: &Measure, p: f64) -> f64 {
    debug_assert!(p > 0.0);
    let s: f64 = f
        .values()
        .iter()
        .zip(sigma.leaf_masses())
        .map(|(v, m)| v.abs().powf(p) * m)
        .sum();
    s.powf(1.0 / p)
}

/// Integral average of f over Q; 0 when sigma(Q) = 0.
pub fn average(tree: &DyadicTree, f: &GridFunction, sigma: &Measure, q: CubeId) -> f64 {
    let m = sigma.of(q);
    if m > 0.0 {
        integrate(tree, f, sigma, q) / m
    } else {
        0.0
    }
}

/// Dyadic maximal function: at each leaf, the largest average of |f| over a
/// cube containing it. Null cubes contribute 0.
///
/// A leaf's own average is |f| there, taken directly rather than as
/// (|f| * mass) / mass, so the pointwise bound M f >= |f| holds without
/// rounding slack.
pub fn maximal_function(tree: &DyadicTree, f: &GridFunction, sigma: &Measure) -> GridFunction {
    let ints = cube_integrals(tree, &f.abs(), sigma);
    let mut best = vec![0.0f64; tree.cube_count()];
    for q in tree.cubes() {
        let m = sigma.of(q);
        let avg = if m > 0.0 {
            match tree.leaf_index(q) {
                Some(leaf) => f.get(leaf).abs(),
                None => ints[q.index()] / m,
            }
        } else {
            0.0
        };
        let up = tree.parent(q).map_or(0.0, |p| best[p.index()]);
        best[q.index()] = up.max(avg);
    }
    let leaf_start = tree.cube_count() - tree.leaf_count();
    GridFunction::from_raw(best[leaf_start..].to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn tree12() -> DyadicTree {
        DyadicTree::build(1, 2).unwrap()
    }

    #[test]
    fn total_and_additivity_examples() {
        let t = tree12();
        let s = Measure::from_leaf_masses(&t, vec![1.0, 1.0, 1.0, 1.0]).unwrap();
        assert_eq!(s.of(t.root()), 4.0);
        let left = t.cube_at(&[0]).unwrap();
        assert_eq!(s.of(left), 2.0);

        let s = Measure::from_leaf_masses(&t, vec![0.0, 0.0, 3.0, 5.0]).unwrap();
        let right = t.cube_at(&[1]).unwrap();
        assert_eq!(s.of(right), 8.0);
    }

    #[test]
    fn additivity_is_bitwise_exact() {
        let t = DyadicTree::build(2, 2).unwrap();
        let masses: Vec<f64> = (0..t.leaf_count())
            .map(|i| (i as f64 * 0.711).sin().abs() * 3.17)
            .collect();
        let s = Measure::from_leaf_masses(&t, masses).unwrap();
        for q in t.cubes() {
            if !t.is_leaf(q) {
                let sum: f64 = t.child_ids(q).map(|c| s.of(c)).sum();
                assert_eq!(s.of(q), sum);
            }
        }
    }

    #[test]
    fn rejects_bad_masses() {
        let t = tree12();
        assert!(Measure::from_leaf_masses(&t, vec![1.0; 3]).is_err());
        assert!(Measure::from_leaf_masses(&t, vec![1.0, -0.5, 0.0, 0.0]).is_err());
        assert!(Measure::from_leaf_masses(&t, vec![1.0, f64::NAN, 0.0, 0.0]).is_err());
    }

    #[test]
    fn integrate_examples() {
        let t = tree12();
        let s = Measure::from_leaf_masses(&t, vec![0.3, 1.2, 0.0, 2.5]).unwrap();
        let one = GridFunction::constant(&t, 1.0);
        for q in t.cubes() {
            assert_eq!(integrate(&t, &one, &s, q), s.of(q));
        }
        let left = t.cube_at(&[0]).unwrap();
        let ind = GridFunction::indicator(&t, left);
        assert_eq!(integrate(&t, &ind, &s, t.root()), s.of(left));

        let t1 = DyadicTree::build(1, 1).unwrap();
        let s1 = Measure::from_leaf_masses(&t1, vec![1.0, 4.0]).unwrap();
        let f = GridFunction::from_values(&t1, vec![2.0, 3.0]).unwrap();
        assert_eq!(integrate(&t1, &f, &s1, t1.root()), 14.0);
    }

    #[test]
    fn lp_norm_examples() {
        let t = tree12();
        let s = Measure::from_leaf_masses(&t, vec![0.5, 1.5, 2.0, 1.0]).unwrap();
        let one = GridFunction::constant(&t, 1.0);
        for p in [0.5, 1.0, 2.0, 3.7] {
            assert_relative_eq!(lp_norm(&one, &s, p), s.total().powf(1.0 / p), max_relative = 1e-15);
        }
        let left = t.cube_at(&[0]).unwrap();
        let ind = GridFunction::indicator(&t, left);
        assert_relative_eq!(lp_norm(&ind, &s, 2.0), s.of(left).sqrt(), max_relative = 1e-15);

        let t1 = DyadicTree::build(1, 1).unwrap();
        let s1 = Measure::from_leaf_masses(&t1, vec![1.0, 1.0]).unwrap();
        let f = GridFunction::from_values(&t1, vec![1.0, 2.0]).unwrap();
        assert_relative_eq!(lp_norm(&f, &s1, 2.0), 5.0f64.sqrt(), max_relative = 1e-15);
    }

    #[test]
    fn average_examples() {
        let t = tree12();
        let s = Measure::from_leaf_masses(&t, vec![1.0, 2.0, 0.0, 0.0]).unwrap();
        let c = GridFunction::constant(&t, 2.5);
        assert_eq!(average(&t, &c, &s, t.root()), 2.5);
        let right = t.cube_at(&[1]).unwrap();
        // Null cube: 0 by convention.
        assert_eq!(average(&t, &c, &s, right), 0.0);

        let t1 = DyadicTree::build(1, 1).unwrap();
        let s1 = Measure::from_leaf_masses(&t1, vec![1.0, 3.0]).unwrap();
        let f = GridFunction::from_values(&t1, vec![2.0, 6.0]).unwrap();
        assert_eq!(average(&t1, &f, &s1, t1.root()), 5.0);
    }

    #[test]
    fn maximal_function_examples() {
        let t1 = DyadicTree::build(1, 1).unwrap();
        let s1 = Measure::from_leaf_masses(&t1, vec![1.0, 1.0]).unwrap();

        let c = GridFunction::constant(&t1, 3.0);
        assert_eq!(maximal_function(&t1, &c, &s1).values(), &[3.0, 3.0]);

        let f = GridFunction::from_values(&t1, vec![4.0, 0.0]).unwrap();
        assert_eq!(maximal_function(&t1, &f, &s1).values(), &[4.0, 2.0]);
    }

    #[test]
    fn maximal_dominates_f_on_positive_leaves() {
        let t = DyadicTree::build(2, 2).unwrap();
        let masses: Vec<f64> = (0..t.leaf_count())
            .map(|i| if i % 3 == 0 { 0.0 } else { 0.25 + i as f64 })
            .collect();
        let s = Measure::from_leaf_masses(&t, masses).unwrap();
        let f = GridFunction::from_values(
            &t,
            (0..t.leaf_count()).map(|i| ((i * 7 % 5) as f64) - 2.0).collect(),
        )
        .unwrap();
        let m = maximal_function(&t, &f, &s);
        for i in 0..t.leaf_count() {
            if s.leaf(i) > 0.0 {
                assert!(m.get(i) >= f.get(i).abs());
            }
        }
    }

    #[test]
    fn indicator_maximal_is_one_on_the_cube() {
        let t = tree12();
        let s = Measure::from_leaf_masses(&t, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let q = t.cube_at(&[1]).unwrap();
        let m = maximal_function(&t, &GridFunction::indicator(&t, q), &s);
        for i in t.leaf_span(q) {
            assert_eq!(m.get(i), 1.0);
        }
    }
}
