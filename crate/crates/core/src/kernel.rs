//! Kernel-indexed objects: the trilinear form, the bilinear positive
//! operator, normalized kernel functions, discrete Wolff potentials and
//! localized kernels.
//!
//! Summation ranges written "below Q" are inclusive of Q itself. Every
//! reduction runs in the fixed cube/leaf enumeration order.

use crate::error::{Error, Result};
use crate::exponents::ExponentTriple;
use crate::measure::{cube_integrals, GridFunction, Measure};
use crate::tree::{CubeId, DyadicTree};

/// Nonnegative weight per cube.
#[derive(Debug, Clone)]
pub struct Kernel {
    values: Vec<f64>,
}

impl Kernel {
    pub fn from_values(tree: &DyadicTree, values: Vec<f64>) -> Result<Self> {
        if values.len() != tree.cube_count() {
            return Err(Error::Mismatch(format!(
                "kernel has {} values, tree has {} cubes",
                values.len(),
                tree.cube_count()
            )));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::InvalidValue(format!(
                "kernel value {bad} is not a finite nonnegative number"
            )));
        }
        Ok(Self { values })
    }

    pub fn constant(tree: &DyadicTree, c: f64) -> Result<Self> {
        Self::from_values(tree, vec![c; tree.cube_count()])
    }

    pub fn zero(tree: &DyadicTree) -> Self {
        Self {
            values: vec![0.0; tree.cube_count()],
        }
    }

    pub fn get(&self, q: CubeId) -> f64 {
        self.values[q.index()]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| v * t).collect(),
        }
    }
}

/// The data of one problem: tree, kernel, three measures and exponents.
#[derive(Debug, Clone)]
pub struct Instance {
    tree: DyadicTree,
    kernel: Kernel,
    measures: [Measure; 3],
    exponents: ExponentTriple,
}

impl Instance {
    pub fn new(
        tree: DyadicTree,
        kernel: Kernel,
        measures: [Measure; 3],
        exponents: ExponentTriple,
    ) -> Result<Self> {
        if kernel.values().len() != tree.cube_count() {
            return Err(Error::Mismatch("kernel does not match tree".to_string()));
        }
        for m in &measures {
            if m.leaf_masses().len() != tree.leaf_count() {
                return Err(Error::Mismatch("measure does not match tree".to_string()));
            }
        }
        Ok(Self {
            tree,
            kernel,
            measures,
            exponents,
        })
    }

    pub fn tree(&self) -> &DyadicTree {
        &self.tree
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn measure(&self, i: usize) -> &Measure {
        &self.measures[i]
    }

    pub fn measures(&self) -> &[Measure; 3] {
        &self.measures
    }

    pub fn exponents(&self) -> &ExponentTriple {
        &self.exponents
    }

    pub fn with_kernel(&self, kernel: Kernel) -> Result<Self> {
        Self::new(
            self.tree.clone(),
            kernel,
            self.measures.clone(),
            self.exponents,
        )
    }
}

/// Sum over all cubes of K(Q) * prod_i |integral of f_i over Q|.
pub fn trilinear_form(
    tree: &DyadicTree,
    kernel: &Kernel,
    sigmas: [&Measure; 3],
    fs: [&GridFunction; 3],
) -> f64 {
    let ints: Vec<Vec<f64>> = (0..3)
        .map(|i| cube_integrals(tree, fs[i], sigmas[i]))
        .collect();
    let mut total = 0.0;
    for q in tree.cubes() {
        let i = q.index();
        total += kernel.get(q) * ints[0][i].abs() * ints[1][i].abs() * ints[2][i].abs();
    }
    total
}

/// The bilinear positive operator: at each leaf, the sum over containing
/// cubes of K(Q) * (integral of f1) * (integral of f2).
pub fn bilinear_operator(
    tree: &DyadicTree,
    kernel: &Kernel,
    sigma1: &Measure,
    f1: &GridFunction,
    sigma2: &Measure,
    f2: &GridFunction,
) -> GridFunction {
    let i1 = cube_integrals(tree, f1, sigma1);
    let i2 = cube_integrals(tree, f2, sigma2);
    let mut acc = vec![0.0f64; tree.cube_count()];
    for q in tree.cubes() {
        let up = tree.parent(q).map_or(0.0, |p| acc[p.index()]);
        acc[q.index()] = up + kernel.get(q) * i1[q.index()] * i2[q.index()];
    }
    let leaf_start = tree.cube_count() - tree.leaf_count();
    GridFunction::from_raw(acc[leaf_start..].to_vec())
}

/// Whether "below Q" sums include Q itself. The `strict-subcubes` feature
/// flips this for sensitivity experiments.
pub const SUBCUBE_SUMS_INCLUDE_TOP: bool = !cfg!(feature = "strict-subcubes");

/// The function x -> (1/mu(Q)) * sum over Q' below Q containing x of
/// K(Q') mu(Q'), supported in Q; identically 0 when mu(Q) = 0.
pub fn normalized_kernel_function(
    tree: &DyadicTree,
    kernel: &Kernel,
    mu: &Measure,
    q: CubeId,
) -> GridFunction {
    let mut values = vec![0.0f64; tree.leaf_count()];
    let mq = mu.of(q);
    if mq > 0.0 {
        descend_chain_sums(tree, kernel, mu, q, true, 0.0, &mut |leaf, acc| {
            values[leaf] = acc / mq;
        });
    }
    GridFunction::from_raw(values)
}

/// Walks the subtree under `q` accumulating K * mu along each root-to-leaf
/// chain (top-down), invoking `sink(leaf_index, chain_sum)` at every leaf.
/// Leaves are visited in ascending order. Under strict mode the top cube
/// itself does not contribute.
fn descend_chain_sums(
    tree: &DyadicTree,
    kernel: &Kernel,
    mu: &Measure,
    q: CubeId,
    is_top: bool,
    acc_above: f64,
    sink: &mut impl FnMut(usize, f64),
) {
    let acc = if is_top && !SUBCUBE_SUMS_INCLUDE_TOP {
        acc_above
    } else {
        acc_above + kernel.get(q) * mu.of(q)
    };
    if let Some(leaf) = tree.leaf_index(q) {
        sink(leaf, acc);
    } else {
        for c in tree.child_ids(q) {
            descend_chain_sums(tree, kernel, mu, c, false, acc, sink);
        }
    }
}

/// Discrete Wolff potential of nu: at each leaf, the sum over containing
/// cubes Q of K(Q) mu(Q) (integral over Q of the normalized kernel function
/// against nu)^(p-1).
///
/// This is the definitional composition; `wolff_potential_fused` performs the
/// identical arithmetic without materializing the intermediate functions and
/// must agree bit for bit.
pub fn wolff_potential(
    p: f64,
    tree: &DyadicTree,
    kernel: &Kernel,
    mu: &Measure,
    nu: &Measure,
) -> GridFunction {
    debug_assert!(p > 1.0);
    let mut values = vec![0.0f64; tree.leaf_count()];
    for q in tree.cubes() {
        let kbar = normalized_kernel_function(tree, kernel, mu, q);
        let inner = crate::measure::integrate(tree, &kbar, nu, q);
        let term = kernel.get(q) * mu.of(q) * inner.powf(p - 1.0);
        for leaf in tree.leaf_span(q) {
            values[leaf] += term;
        }
    }
    GridFunction::from_raw(values)
}

/// Fused traversal of the Wolff potential: same operations in the same order
/// as `wolff_potential`, skipping the intermediate grid functions.
pub fn wolff_potential_fused(
    p: f64,
    tree: &DyadicTree,
    kernel: &Kernel,
    mu: &Measure,
    nu: &Measure,
) -> GridFunction {
    debug_assert!(p > 1.0);
    let mut values = vec![0.0f64; tree.leaf_count()];
    for q in tree.cubes() {
        let mq = mu.of(q);
        let mut inner = 0.0f64;
        if mq > 0.0 {
            descend_chain_sums(tree, kernel, mu, q, true, 0.0, &mut |leaf, acc| {
                inner += (acc / mq) * nu.leaf(leaf);
            });
        }
        let term = kernel.get(q) * mq * inner.powf(p - 1.0);
        for leaf in tree.leaf_span(q) {
            values[leaf] += term;
        }
    }
    GridFunction::from_raw(values)
}

/// The kernel equal to K(Q') mu(Q') on cubes below Q and 0 elsewhere.
pub fn localized_kernel(tree: &DyadicTree, kernel: &Kernel, q: CubeId, mu: &Measure) -> Kernel {
    let mut values = vec![0.0f64; tree.cube_count()];
    for r in tree.subtree(q) {
        if r == q && !SUBCUBE_SUMS_INCLUDE_TOP {
            continue;
        }
        values[r.index()] = kernel.get(r) * mu.of(r);
    }
    Kernel { values }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{integrate, lp_norm};
    use approx::assert_relative_eq;

    fn two_leaf_setup() -> (DyadicTree, Kernel, Measure) {
        let t = DyadicTree::build(1, 1).unwrap();
        // Cube order: root, left leaf, right leaf.
        let k = Kernel::from_values(&t, vec![1.0, 2.0, 0.0]).unwrap();
        let s = Measure::from_leaf_masses(&t, vec![1.0, 1.0]).unwrap();
        (t, k, s)
    }

    #[test]
    fn zero_kernel_gives_zero_form() {
        let (t, _, s) = two_leaf_setup();
        let k = Kernel::zero(&t);
        let f = GridFunction::from_values(&t, vec![3.0, -1.0]).unwrap();
        assert_eq!(trilinear_form(&t, &k, [&s, &s, &s], [&f, &f, &f]), 0.0);
    }

    #[test]
    fn single_cube_form() {
        let t = DyadicTree::build(1, 0).unwrap();
        let k = Kernel::constant(&t, 0.7).unwrap();
        let s1 = Measure::from_leaf_masses(&t, vec![2.0]).unwrap();
        let s2 = Measure::from_leaf_masses(&t, vec![3.0]).unwrap();
        let s3 = Measure::from_leaf_masses(&t, vec![5.0]).unwrap();
        let one = GridFunction::constant(&t, 1.0);
        assert_relative_eq!(
            trilinear_form(&t, &k, [&s1, &s2, &s3], [&one, &one, &one]),
            0.7 * 2.0 * 3.0 * 5.0,
            max_relative = 1e-15
        );
    }

    #[test]
    fn two_term_form_by_hand() {
        let (t, k, s) = two_leaf_setup();
        let one = GridFunction::constant(&t, 1.0);
        // Root: 1 * 2 * 2 * 2 = 8; left leaf: 2 * 1 = 2; right: 0.
        assert_eq!(trilinear_form(&t, &k, [&s, &s, &s], [&one, &one, &one]), 10.0);
    }

    #[test]
    fn bilinear_zero_and_single_cube() {
        let (t, _, s) = two_leaf_setup();
        let z = Kernel::zero(&t);
        let one = GridFunction::constant(&t, 1.0);
        assert_eq!(bilinear_operator(&t, &z, &s, &one, &s, &one).values(), &[0.0, 0.0]);

        let t0 = DyadicTree::build(1, 0).unwrap();
        let k0 = Kernel::constant(&t0, 3.0).unwrap();
        let sa = Measure::from_leaf_masses(&t0, vec![2.0]).unwrap();
        let sb = Measure::from_leaf_masses(&t0, vec![5.0]).unwrap();
        let fa = GridFunction::constant(&t0, 1.5);
        let fb = GridFunction::constant(&t0, 2.0);
        let out = bilinear_operator(&t0, &k0, &sa, &fa, &sb, &fb);
        assert_relative_eq!(out.get(0), 3.0 * (1.5 * 2.0) * (2.0 * 5.0), max_relative = 1e-15);
    }

    #[test]
    fn duality_spot_value() {
        let (t, k, s) = two_leaf_setup();
        let one = GridFunction::constant(&t, 1.0);
        let t_op = bilinear_operator(&t, &k, &s, &one, &s, &one);
        let paired = integrate(&t, &t_op.mul(&one), &s, t.root());
        assert_relative_eq!(paired, 10.0, max_relative = 1e-15);
        assert_relative_eq!(
            paired,
            trilinear_form(&t, &k, [&s, &s, &s], [&one, &one, &one]),
            max_relative = 1e-12
        );
    }

    #[test]
    fn normalized_kernel_examples() {
        let t0 = DyadicTree::build(1, 0).unwrap();
        let k0 = Kernel::constant(&t0, 4.2).unwrap();
        let m0 = Measure::from_leaf_masses(&t0, vec![3.0]).unwrap();
        let kb = normalized_kernel_function(&t0, &k0, &m0, t0.root());
        assert_relative_eq!(kb.get(0), 4.2, max_relative = 1e-15);

        // mu(Q) = 0 gives the zero function.
        let t = DyadicTree::build(1, 1).unwrap();
        let k = Kernel::constant(&t, 1.0).unwrap();
        let null = Measure::from_leaf_masses(&t, vec![0.0, 0.0]).unwrap();
        assert_eq!(
            normalized_kernel_function(&t, &k, &null, t.root()).values(),
            &[0.0, 0.0]
        );

        // Two-leaf hand sum.
        let k = Kernel::from_values(&t, vec![1.0, 2.0, 0.0]).unwrap();
        let m = Measure::from_leaf_masses(&t, vec![1.0, 3.0]).unwrap();
        let kb = normalized_kernel_function(&t, &k, &m, t.root());
        assert_relative_eq!(kb.get(0), 1.5, max_relative = 1e-15);
        assert_relative_eq!(kb.get(1), 1.0, max_relative = 1e-15);
    }

    #[test]
    fn normalized_kernel_reconstruction_is_exact() {
        let t = DyadicTree::build(2, 2).unwrap();
        let k = Kernel::from_values(
            &t,
            (0..t.cube_count()).map(|i| (i as f64 * 0.37).cos().abs()).collect(),
        )
        .unwrap();
        let m = Measure::from_leaf_masses(
            &t,
            (0..t.leaf_count()).map(|i| (i % 5) as f64 * 0.5).collect(),
        )
        .unwrap();
        for q in t.cubes() {
            let mq = m.of(q);
            if mq == 0.0 {
                continue;
            }
            let kb = normalized_kernel_function(&t, &k, &m, q);
            for leaf in t.leaf_span(q) {
                let expected: f64 = t
                    .ancestors(t.leaf_cube(leaf))
                    .filter(|&a| t.contains(q, a))
                    .map(|a| k.get(a) * m.of(a))
                    .sum();
                assert_relative_eq!(mq * kb.get(leaf), expected, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn wolff_zero_kernel_and_single_cube() {
        let t = DyadicTree::build(1, 1).unwrap();
        let z = Kernel::zero(&t);
        let m = Measure::from_leaf_masses(&t, vec![1.0, 2.0]).unwrap();
        assert_eq!(wolff_potential(2.0, &t, &z, &m, &m).values(), &[0.0, 0.0]);

        let t0 = DyadicTree::build(1, 0).unwrap();
        let k0 = Kernel::constant(&t0, 1.3).unwrap();
        let mu = Measure::from_leaf_masses(&t0, vec![2.0]).unwrap();
        let nu = Measure::from_leaf_masses(&t0, vec![5.0]).unwrap();
        let w = wolff_potential(2.0, &t0, &k0, &mu, &nu);
        assert_relative_eq!(w.get(0), 1.3 * 1.3 * 2.0 * 5.0, max_relative = 1e-15);
    }

    #[test]
    fn wolff_is_linear_in_nu_at_p_two() {
        let t = DyadicTree::build(1, 2).unwrap();
        let k = Kernel::from_values(
            &t,
            (0..t.cube_count()).map(|i| 0.1 + (i as f64 * 1.7).sin().abs()).collect(),
        )
        .unwrap();
        let mu = Measure::from_leaf_masses(&t, vec![0.5, 2.0, 0.0, 1.0]).unwrap();
        let nu1 = Measure::from_leaf_masses(&t, vec![1.0, 0.0, 3.0, 0.5]).unwrap();
        let nu2 = Measure::from_leaf_masses(&t, vec![0.2, 1.1, 0.0, 2.0]).unwrap();
        let sum = Measure::from_leaf_masses(
            &t,
            nu1.leaf_masses()
                .iter()
                .zip(nu2.leaf_masses())
                .map(|(a, b)| a + b)
                .collect(),
        )
        .unwrap();
        let w1 = wolff_potential(2.0, &t, &k, &mu, &nu1);
        let w2 = wolff_potential(2.0, &t, &k, &mu, &nu2);
        let ws = wolff_potential(2.0, &t, &k, &mu, &sum);
        for i in 0..t.leaf_count() {
            assert_relative_eq!(ws.get(i), w1.get(i) + w2.get(i), max_relative = 1e-12);
        }
    }

    #[test]
    fn fused_wolff_matches_bit_for_bit() {
        let t = DyadicTree::build(2, 2).unwrap();
        let k = Kernel::from_values(
            &t,
            (0..t.cube_count()).map(|i| (i as f64 * 0.93).sin().abs()).collect(),
        )
        .unwrap();
        let mu = Measure::from_leaf_masses(
            &t,
            (0..t.leaf_count()).map(|i| if i % 4 == 1 { 0.0 } else { 0.3 + i as f64 }).collect(),
        )
        .unwrap();
        let nu = Measure::from_leaf_masses(
            &t,
            (0..t.leaf_count()).map(|i| (i as f64 * 0.21).cos().abs()).collect(),
        )
        .unwrap();
        for p in [1.5, 2.0, 3.0] {
            let a = wolff_potential(p, &t, &k, &mu, &nu);
            let b = wolff_potential_fused(p, &t, &k, &mu, &nu);
            assert_eq!(a.values(), b.values());
        }
    }

    #[test]
    fn localized_kernel_examples() {
        let t = DyadicTree::build(1, 1).unwrap();
        let k = Kernel::from_values(&t, vec![0.5, 1.5, 2.5]).unwrap();
        let m = Measure::from_leaf_masses(&t, vec![1.0, 1.0]).unwrap();

        let full = localized_kernel(&t, &k, t.root(), &m);
        for q in t.cubes() {
            assert_eq!(full.get(q), k.get(q) * m.of(q));
        }

        let left = t.cube_at(&[0]).unwrap();
        let loc = localized_kernel(&t, &k, left, &m);
        assert_eq!(loc.get(t.root()), 0.0);
        assert_eq!(loc.get(left), 1.5);
        assert_eq!(loc.get(t.cube_at(&[1]).unwrap()), 0.0);
    }

    #[test]
    fn homogeneity_and_monotonicity() {
        let (t, k, s) = two_leaf_setup();
        let f = GridFunction::from_values(&t, vec![1.0, 2.0]).unwrap();
        let base = trilinear_form(&t, &k, [&s, &s, &s], [&f, &f, &f]);
        let scaled = trilinear_form(&t, &k.scaled(3.0), [&s, &s, &s], [&f, &f, &f]);
        assert_relative_eq!(scaled, 3.0 * base, max_relative = 1e-12);
        let f2 = f.scaled(2.0);
        assert_relative_eq!(
            trilinear_form(&t, &k, [&s, &s, &s], [&f2, &f, &f]),
            2.0 * base,
            max_relative = 1e-12
        );

        // Enlarging K never decreases the form, the operator or the potential.
        let bigger = Kernel::from_values(&t, vec![1.0, 2.5, 0.7]).unwrap();
        assert!(trilinear_form(&t, &bigger, [&s, &s, &s], [&f, &f, &f]) >= base);
        let t_small = bilinear_operator(&t, &k, &s, &f, &s, &f);
        let t_big = bilinear_operator(&t, &bigger, &s, &f, &s, &f);
        let w_small = wolff_potential(2.0, &t, &k, &s, &s);
        let w_big = wolff_potential(2.0, &t, &bigger, &s, &s);
        for i in 0..t.leaf_count() {
            assert!(t_big.get(i) >= t_small.get(i));
            assert!(w_big.get(i) >= w_small.get(i));
        }
    }

    #[test]
    fn wolff_homogeneity_is_t_to_the_p() {
        let t = DyadicTree::build(1, 2).unwrap();
        let k = Kernel::from_values(
            &t,
            (0..t.cube_count()).map(|i| 0.2 + (i as f64) * 0.1).collect(),
        )
        .unwrap();
        let mu = Measure::from_leaf_masses(&t, vec![1.0, 0.5, 2.0, 0.25]).unwrap();
        let nu = Measure::from_leaf_masses(&t, vec![0.7, 1.0, 0.0, 1.5]).unwrap();
        for p in [1.5, 2.5] {
            let w = wolff_potential(p, &t, &k, &mu, &nu);
            let ws = wolff_potential(p, &t, &k.scaled(2.0), &mu, &nu);
            for i in 0..t.leaf_count() {
                assert_relative_eq!(ws.get(i), 2.0f64.powf(p) * w.get(i), max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn instance_requires_matching_tree() {
        let t = DyadicTree::build(1, 1).unwrap();
        let other = DyadicTree::build(1, 2).unwrap();
        let k = Kernel::zero(&other);
        let s = Measure::uniform(&t, 1.0).unwrap();
        let e = ExponentTriple::new(2.0, 2.0, 2.0).unwrap();
        assert!(Instance::new(t, k, [s.clone(), s.clone(), s], e).is_err());
    }

    #[cfg(feature = "strict-subcubes")]
    #[test]
    fn strict_mode_drops_the_top_cube() {
        let t = DyadicTree::build(1, 1).unwrap();
        let k = Kernel::from_values(&t, vec![1.0, 2.0, 0.0]).unwrap();
        let m = Measure::from_leaf_masses(&t, vec![1.0, 3.0]).unwrap();
        let kb = normalized_kernel_function(&t, &k, &m, t.root());
        // Only the leaf terms remain: (2*1)/4 and 0.
        assert_relative_eq!(kb.get(0), 0.5, max_relative = 1e-15);
        assert_eq!(kb.get(1), 0.0);
        let loc = localized_kernel(&t, &k, t.root(), &m);
        assert_eq!(loc.get(t.root()), 0.0);
    }

    #[test]
    fn lp_norm_of_bilinear_output_is_finite() {
        let (t, k, s) = two_leaf_setup();
        let f = GridFunction::constant(&t, 1.0);
        let out = bilinear_operator(&t, &k, &s, &f, &s, &f);
        assert!(lp_norm(&out, &s, 2.0).is_finite());
    }
}
