//! Numerical replay of the stopping-time bound: builds the three forests,
//! regroups the cube sum, and records every inequality of the chain with both
//! sides. Steps come in three kinds: upper bounds and equalities (which must
//! hold up to 1e-12 relative dust) and measured constants, which are reported
//! rather than asserted.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exponents::{dual_exponent, PairRegime};
use crate::kernel::{trilinear_form, Instance};
use crate::measure::{average, cube_integrals, lp_norm, maximal_function, GridFunction};
use crate::tree::{CubeId, DyadicTree};

use super::{ch_subset, grouped_decomposition, modified_function, principal_cubes, PrincipalForest};

/// Relative slack allowed on exact steps.
pub const STEP_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepKind {
    /// lhs <= rhs up to relative dust.
    UpperBound,
    /// lhs = rhs up to relative dust.
    Equality,
    /// Reported constant; never asserted.
    Measured,
}

/// One recorded inequality with both sides.
#[derive(Debug, Clone, Serialize)]
pub struct StepRecord {
    pub name: String,
    pub kind: StepKind,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub pass: bool,
}

fn safe_ratio(lhs: f64, rhs: f64) -> f64 {
    if rhs > 0.0 {
        lhs / rhs
    } else if lhs == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

impl StepRecord {
    fn upper(name: &str, lhs: f64, rhs: f64) -> Self {
        let pass = lhs <= rhs + STEP_TOLERANCE * rhs.abs().max(lhs.abs()).max(1e-300);
        Self {
            name: name.to_string(),
            kind: StepKind::UpperBound,
            lhs,
            rhs,
            ratio: safe_ratio(lhs, rhs),
            pass,
        }
    }

    fn equality(name: &str, lhs: f64, rhs: f64) -> Self {
        let scale = lhs.abs().max(rhs.abs());
        let pass = (lhs - rhs).abs() <= STEP_TOLERANCE * scale.max(1e-300);
        Self {
            name: name.to_string(),
            kind: StepKind::Equality,
            lhs,
            rhs,
            ratio: safe_ratio(lhs, rhs),
            pass,
        }
    }

    fn measured(name: &str, lhs: f64, rhs: f64) -> Self {
        Self {
            name: name.to_string(),
            kind: StepKind::Measured,
            lhs,
            rhs,
            ratio: safe_ratio(lhs, rhs),
            pass: !lhs.is_nan() && !rhs.is_nan(),
        }
    }
}

/// Chain of one permutation block: the groups whose stopping parents nest as
/// F_a inside F_b inside F_c.
#[derive(Debug, Clone, Serialize)]
pub struct BlockCertificate {
    /// Role indices (a, b, c); c owns the outermost parent.
    pub roles: [usize; 3],
    pub group_count: usize,
    pub cube_count: usize,
    /// The block's share of the trilinear form.
    pub block_form: f64,
    pub s_exponents: [f64; 2],
    /// (i_a) and (i_b): l^{p_i} sums of the modified-function norms.
    pub i_inner: [f64; 2],
    /// (i_c): the averaged outer sum.
    pub i_outer: f64,
    /// Measured bilinear-embedding constant: the worst localized form over
    /// its testing-certified bound.
    pub beta_ratio: f64,
    pub steps: Vec<StepRecord>,
    /// Certified upper bound on the block's share.
    pub bound: f64,
    pub pass: bool,
}

/// One group of the cube-sum rewriting: all cubes sharing a triple of
/// stopping parents.
#[derive(Debug, Clone, Serialize)]
pub struct GroupDoc {
    /// Paths of the three stopping parents.
    pub parents: [Vec<u32>; 3],
    /// Paths of the cubes in the group.
    pub cubes: Vec<Vec<u32>>,
}

/// The full certificate: forest structure, the grouped decomposition, global
/// invariants, one chain per nonempty block, and the assembled final bound.
#[derive(Debug, Clone, Serialize)]
pub struct CoronaCertificate {
    pub c2: f64,
    /// Trilinear form of the instance at the given functions.
    pub form: f64,
    pub norms: [f64; 3],
    pub forests: [Vec<Vec<u32>>; 3],
    pub groups: Vec<GroupDoc>,
    pub invariants: Vec<StepRecord>,
    pub blocks: Vec<BlockCertificate>,
    pub final_bound: f64,
    /// form / (product of norms); 0 when degenerate.
    pub final_ratio: f64,
    pub pass: bool,
}

/// Groups of one permutation block: (stopping-parent triple, cubes).
type BlockGroups<'a> = Vec<([CubeId; 3], &'a Vec<CubeId>)>;

struct BlockInput<'a> {
    inst: &'a Instance,
    fs: &'a [GridFunction; 3],
    forests: &'a [PrincipalForest; 3],
    ints: &'a [Vec<f64>; 3],
    maximal: &'a [GridFunction; 3],
    norms: &'a [f64; 3],
    c2: f64,
}

/// Verifies the whole chain for the given functions against the testing
/// constant `c2`. Rejects infeasible (infinite) constants.
pub fn verify_corona_certificate(
    inst: &Instance,
    fs: &[GridFunction; 3],
    c2: f64,
) -> Result<CoronaCertificate> {
    if !c2.is_finite() || c2 < 0.0 {
        return Err(Error::CertificateRejected(format!(
            "testing constant {c2} is not finite and nonnegative"
        )));
    }
    for f in fs {
        if f.values().iter().any(|v| *v < 0.0) {
            return Err(Error::InvalidValue(
                "certificate functions must be nonnegative".to_string(),
            ));
        }
    }
    let tree = inst.tree();
    let root = tree.root();
    let norms = [0, 1, 2].map(|i| lp_norm(&fs[i], inst.measure(i), inst.exponents().p(i)));
    let sigmas = inst.measures();
    let form = trilinear_form(
        tree,
        inst.kernel(),
        [&sigmas[0], &sigmas[1], &sigmas[2]],
        [&fs[0], &fs[1], &fs[2]],
    );

    let forests = [
        principal_cubes(tree, &fs[0], inst.measure(0), root),
        principal_cubes(tree, &fs[1], inst.measure(1), root),
        principal_cubes(tree, &fs[2], inst.measure(2), root),
    ];
    let ints = [
        cube_integrals(tree, &fs[0], inst.measure(0)),
        cube_integrals(tree, &fs[1], inst.measure(1)),
        cube_integrals(tree, &fs[2], inst.measure(2)),
    ];
    let maximal = [
        maximal_function(tree, &fs[0], inst.measure(0)),
        maximal_function(tree, &fs[1], inst.measure(1)),
        maximal_function(tree, &fs[2], inst.measure(2)),
    ];

    let mut invariants = Vec::new();

    // Halving and exceptional-partition checks, one per forest.
    for (i, forest) in forests.iter().enumerate() {
        let sigma = inst.measure(i);
        let mut worst = 0.0f64;
        let mut e_total = 0.0f64;
        let mut covered = vec![false; tree.leaf_count()];
        let mut overlap = 0usize;
        for fcube in forest.cubes() {
            let e_leaves = forest.exceptional_leaves(fcube)?;
            let e_mass: f64 = e_leaves.iter().map(|&l| sigma.leaf(l)).sum();
            e_total += e_mass;
            if sigma.of(fcube) > 0.0 {
                worst = worst.max(safe_ratio(sigma.of(fcube) / 2.0, e_mass));
            }
            for &l in e_leaves {
                if covered[l] {
                    overlap += 1;
                }
                covered[l] = true;
            }
        }
        let missing = covered.iter().filter(|&&b| !b).count();
        invariants.push(StepRecord::upper(&format!("halving-{i}"), worst, 1.0));
        invariants.push(StepRecord::equality(
            &format!("exceptional-partition-{i}"),
            e_total,
            sigma.total(),
        ));
        invariants.push(StepRecord::upper(
            &format!("exceptional-disjointness-{i}"),
            (overlap + missing) as f64,
            0.0,
        ));
    }

    // Pointwise maximal domination over every forest cube.
    for (i, forest) in forests.iter().enumerate() {
        let sigma = inst.measure(i);
        let mut worst = 0.0f64;
        for fcube in forest.cubes() {
            let avg = average(tree, &fs[i], sigma, fcube);
            if avg == 0.0 {
                continue;
            }
            let min_m = tree
                .leaf_span(fcube)
                .filter(|&l| sigma.leaf(l) > 0.0)
                .map(|l| maximal[i].get(l))
                .fold(f64::INFINITY, f64::min);
            worst = worst.max(safe_ratio(avg, min_m));
        }
        invariants.push(StepRecord::upper(&format!("maximal-domination-{i}"), worst, 1.0));
    }

    // Grouped decomposition and its reconstruction identity.
    let dec = grouped_decomposition(tree, &forests)?;
    let mut regrouped = 0.0f64;
    for group in dec.groups.values() {
        for &q in group {
            regrouped += inst.kernel().get(q)
                * ints[0][q.index()]
                * ints[1][q.index()]
                * ints[2][q.index()];
        }
    }
    invariants.push(StepRecord::equality("reconstruction", regrouped, form));

    // Assign each group to the permutation block with the deepest parent
    // first; ties break by role index so the partition is deterministic.
    let mut block_groups: std::collections::BTreeMap<[usize; 3], BlockGroups<'_>> =
        std::collections::BTreeMap::new();
    for (key, group) in &dec.groups {
        let mut order = [0usize, 1, 2];
        order.sort_by_key(|&i| (std::cmp::Reverse(tree.generation(key[i])), i));
        block_groups.entry(order).or_default().push((*key, group));
    }

    // Composed-parent observation: every outer stopping child inside a group
    // cube must pass the two composed membership tests.
    let mut observation_violations = 0usize;
    for (roles, groups) in &block_groups {
        let c = roles[2];
        for (key, group) in groups {
            let h = key[c];
            for i in [roles[0], roles[1]] {
                let subset = ch_subset(tree, &forests[c], &forests[i], h)?;
                for &q in group.iter() {
                    for &child in forests[c].children(h)? {
                        if child != q && tree.contains(q, child) && !subset.contains(&child) {
                            observation_violations += 1;
                        }
                    }
                }
            }
        }
    }
    invariants.push(StepRecord::upper(
        "composed-parent-observation",
        observation_violations as f64,
        0.0,
    ));

    let input = BlockInput {
        inst,
        fs,
        forests: &forests,
        ints: &ints,
        maximal: &maximal,
        norms: &norms,
        c2,
    };
    let mut blocks = Vec::new();
    for (roles, groups) in &block_groups {
        blocks.push(verify_block(&input, *roles, groups)?);
    }

    let final_bound: f64 = blocks.iter().map(|b| b.bound).sum();
    invariants.push(StepRecord::upper("final-bound", form, final_bound));

    let norm_product: f64 = norms.iter().product();
    let final_ratio = safe_ratio(form, norm_product);
    let pass = invariants.iter().all(|s| s.pass) && blocks.iter().all(|b| b.pass);

    let groups = dec
        .groups
        .iter()
        .map(|(key, cubes)| GroupDoc {
            parents: [0, 1, 2].map(|i| tree.path(key[i])),
            cubes: cubes.iter().map(|&q| tree.path(q)).collect(),
        })
        .collect();

    Ok(CoronaCertificate {
        c2,
        form,
        norms,
        forests: [0, 1, 2].map(|i| forests[i].cubes().map(|q| tree.path(q)).collect()),
        groups,
        invariants,
        blocks,
        final_bound,
        final_ratio: if final_ratio.is_finite() { final_ratio } else { 0.0 },
        pass,
    })
}

/// Testing constants of the kernel localized at `h` by sigma_c, for the pair
/// (sigma_a, p_a), (sigma_b, p_b): the worse of the two directions.
fn localized_pair_constant(
    tree: &DyadicTree,
    inst: &Instance,
    h: CubeId,
    a: usize,
    b: usize,
    c: usize,
) -> Result<f64> {
    let exps = inst.exponents();
    let sc = inst.measure(c);
    match exps.pair_regime(a, b) {
        PairRegime::Sawyer => {
            let mut worst = 0.0f64;
            for (inner, outer) in [(a, b), (b, a)] {
                let s_in = inst.measure(inner);
                let s_out = inst.measure(outer);
                let p_out_dual = dual_exponent(exps.p(outer));
                for r in tree.subtree(h) {
                    let mut raised = 0.0;
                    for leaf in tree.leaf_span(r) {
                        let lc = tree.leaf_cube(leaf);
                        let chain: f64 = tree
                            .ancestors(lc)
                            .filter(|&x| tree.contains(r, x))
                            .map(|x| inst.kernel().get(x) * sc.of(x) * s_in.of(x))
                            .sum();
                        raised += chain.powf(p_out_dual) * s_out.leaf(leaf);
                    }
                    let num = raised.powf(1.0 / p_out_dual);
                    let den = s_in.of(r).powf(1.0 / exps.p(inner));
                    if den > 0.0 {
                        worst = worst.max(num / den);
                    } else if num > 0.0 {
                        return Err(Error::CertificateRejected(
                            "localized Sawyer quotient is infeasible".to_string(),
                        ));
                    }
                }
            }
            Ok(worst)
        }
        PairRegime::Wolff { .. } => {
            let loc = crate::kernel::localized_kernel(tree, inst.kernel(), h, sc);
            let (w1, w2) = crate::testing::wolff_pair_constants(
                tree,
                &loc,
                inst.measure(a),
                exps.p(a),
                inst.measure(b),
                exps.p(b),
            )?;
            Ok(w1.max(w2))
        }
    }
}

fn verify_block(
    input: &BlockInput<'_>,
    roles: [usize; 3],
    groups: &BlockGroups<'_>,
) -> Result<BlockCertificate> {
    let inst = input.inst;
    let tree = inst.tree();
    let exps = inst.exponents();
    let (a, b, c) = (roles[0], roles[1], roles[2]);
    let (pa, pb, pc) = (exps.p(a), exps.p(b), exps.p(c));
    let forest_c = &input.forests[c];
    let sc = inst.measure(c);
    let mut steps = Vec::new();

    // Auxiliary exponents with their constraints re-verified.
    let (sa, sb) = exps.aux_pair(a, b, c)?;
    steps.push(StepRecord::equality(
        "aux-exponent-sum",
        1.0 / sa + 1.0 / sb + 1.0 / pc,
        1.0,
    ));
    steps.push(StepRecord::upper("aux-exponent-order-a", pa, sa));
    steps.push(StepRecord::upper("aux-exponent-order-b", pb, sb));

    // Block share of the form.
    let mut block_form = 0.0f64;
    let mut cube_count = 0usize;
    for (_, group) in groups {
        for &q in group.iter() {
            block_form += inst.kernel().get(q)
                * input.ints[0][q.index()]
                * input.ints[1][q.index()]
                * input.ints[2][q.index()];
            cube_count += 1;
        }
    }

    // Cubes of this block keyed by the outer parent.
    let mut under_h: std::collections::BTreeMap<CubeId, Vec<CubeId>> =
        std::collections::BTreeMap::new();
    for (key, group) in groups {
        under_h.entry(key[c]).or_default().extend(group.iter().copied());
    }

    // Per-H quantities, summed over every forest cube (absent entries are
    // zero and only pad the right-hand sides).
    let mut alpha_rhs = 0.0f64;
    let mut alpha_rhs_mod = 0.0f64;
    let mut worst_alpha_term = 0.0f64;
    let mut c_sum = 0.0f64;
    let mut d_sum = 0.0f64;
    let mut e_factor_a = 0.0f64;
    let mut e_factor_b = 0.0f64;
    let mut i_inner_a_sum = 0.0f64;
    let mut i_inner_b_sum = 0.0f64;
    let mut i_outer_sum = 0.0f64;
    let mut worst_pair_test = 0.0f64;
    let mut beta_ratio = 0.0f64;
    // Pieces of the inner decompositions.
    let mut inner_exceptional = [0.0f64; 2];
    let mut inner_children = [0.0f64; 2];

    for h in forest_c.cubes() {
        let avg_c = average(tree, &input.fs[c], sc, h);
        let ch_a = ch_subset(tree, forest_c, &input.forests[a], h)?;
        let ch_b = ch_subset(tree, forest_c, &input.forests[b], h)?;
        let fa_h = modified_function(tree, &input.fs[a], inst.measure(a), forest_c, h, &ch_a)?;
        let fb_h = modified_function(tree, &input.fs[b], inst.measure(b), forest_c, h, &ch_b)?;
        let ia_h = cube_integrals(tree, &fa_h, inst.measure(a));
        let ib_h = cube_integrals(tree, &fb_h, inst.measure(b));

        let norm_a = lp_norm(&fa_h, inst.measure(a), pa);
        let norm_b = lp_norm(&fb_h, inst.measure(b), pb);

        // T_H with the original and the modified functions.
        let mut t_h = 0.0f64;
        let mut t_h_mod = 0.0f64;
        if let Some(cubes) = under_h.get(&h) {
            for &q in cubes {
                let kq = inst.kernel().get(q) * sc.of(q);
                t_h += kq * input.ints[a][q.index()] * input.ints[b][q.index()];
                t_h_mod += kq * ia_h[q.index()] * ib_h[q.index()];
                // Per-term stopping bound for the outer function.
                let ic = input.ints[c][q.index()];
                let cap = 2.0 * avg_c * sc.of(q);
                if ic > 0.0 || cap > 0.0 {
                    worst_alpha_term = worst_alpha_term.max(safe_ratio(ic, cap));
                }
            }
        }
        alpha_rhs += 2.0 * avg_c * t_h;
        alpha_rhs_mod += 2.0 * avg_c * t_h_mod;

        // Full localized bilinear form on the modified functions.
        let mut lambda = 0.0f64;
        for r in tree.subtree(h) {
            lambda += inst.kernel().get(r) * sc.of(r) * ia_h[r.index()] * ib_h[r.index()];
        }
        c_sum += 2.0 * avg_c * lambda;

        // Localized testing constants against c2.
        let cert = input.c2 * sc.of(h).powf(1.0 / pc);
        let pair = localized_pair_constant(tree, inst, h, a, b, c)?;
        if cert > 0.0 || pair > 0.0 {
            worst_pair_test = worst_pair_test.max(safe_ratio(pair, cert));
        }

        // Measured embedding constant for this cube.
        let denom = cert * norm_a * norm_b;
        if denom > 0.0 {
            beta_ratio = beta_ratio.max(lambda / denom);
        }
        d_sum += 2.0 * avg_c * input.c2 * sc.of(h).powf(1.0 / pc) * norm_a * norm_b;

        e_factor_a += norm_a.powf(sa);
        e_factor_b += norm_b.powf(sb);
        i_inner_a_sum += norm_a.powf(pa);
        i_inner_b_sum += norm_b.powf(pb);
        i_outer_sum += avg_c.powf(pc) * sc.of(h);

        // Inner decomposition pieces.
        for (slot, (i, ch)) in [(a, &ch_a), (b, &ch_b)].into_iter().enumerate() {
            let sigma = inst.measure(i);
            let p = exps.p(i);
            let e_part: f64 = forest_c
                .exceptional_leaves(h)?
                .iter()
                .map(|&l| input.fs[i].get(l).abs().powf(p) * sigma.leaf(l))
                .sum();
            let ch_part: f64 = ch
                .iter()
                .map(|&child| {
                    average(tree, &input.fs[i], sigma, child).powf(p) * sigma.of(child)
                })
                .sum();
            inner_exceptional[slot] += e_part;
            inner_children[slot] += ch_part;
        }
    }

    steps.push(StepRecord::upper("stopping-average", worst_alpha_term, 1.0));
    steps.push(StepRecord::upper("alpha", block_form, alpha_rhs));
    steps.push(StepRecord::equality("replacement", alpha_rhs, alpha_rhs_mod));
    steps.push(StepRecord::upper("localized-domination", alpha_rhs_mod, c_sum));
    steps.push(StepRecord::upper("pair-testing", worst_pair_test, 1.0));
    steps.push(StepRecord::measured("beta-embedding", beta_ratio, 1.0));
    steps.push(StepRecord::upper("beta-chain", c_sum, beta_ratio * d_sum));

    let i_inner = [i_inner_a_sum.powf(1.0 / pa), i_inner_b_sum.powf(1.0 / pb)];
    let i_outer = i_outer_sum.powf(1.0 / pc);
    let e_sum =
        2.0 * input.c2 * e_factor_a.powf(1.0 / sa) * e_factor_b.powf(1.0 / sb) * i_outer;
    let f_sum = 2.0 * input.c2 * i_inner[0] * i_inner[1] * i_outer;
    steps.push(StepRecord::upper("hoelder", d_sum, e_sum));
    steps.push(StepRecord::upper("lp-monotonicity", e_sum, f_sum));

    let bound = beta_ratio * f_sum;
    steps.push(StepRecord::upper("block-bound", block_form, bound));

    // Inner chains (the two modified-function norm sums).
    for (slot, i) in [a, b].into_iter().enumerate() {
        let sigma = inst.measure(i);
        let p = exps.p(i);
        let pd = dual_exponent(p);
        let tag = if slot == 0 { "a" } else { "b" };
        let i_sum = if slot == 0 { i_inner_a_sum } else { i_inner_b_sum };

        steps.push(StepRecord::equality(
            &format!("inner-decomposition-{tag}"),
            i_sum,
            inner_exceptional[slot] + inner_children[slot],
        ));
        let norm_p = input.norms[i].powf(p);
        steps.push(StepRecord::upper(
            &format!("inner-exceptional-{tag}"),
            inner_exceptional[slot],
            norm_p,
        ));

        // Reorganization: children keyed by their strict inner parent.
        let forest_i = &input.forests[i];
        let mut doubled = 0.0f64;
        let mut plain_nonroot = 0.0f64;
        let mut plain_all = 0.0f64;
        for fcube in forest_i.cubes() {
            let v = average(tree, &input.fs[i], sigma, fcube).powf(p) * sigma.of(fcube);
            plain_all += v;
            doubled += 2.0f64.powf(p) * v;
            if fcube != forest_i.root() {
                plain_nonroot += v;
            }
        }
        steps.push(StepRecord::upper(
            &format!("inner-reorganization-{tag}"),
            inner_children[slot],
            doubled + plain_nonroot,
        ));

        let maximal_p: f64 = input.maximal[i]
            .values()
            .iter()
            .zip(sigma.leaf_masses())
            .map(|(m, w)| m.powf(p) * w)
            .sum();
        steps.push(StepRecord::upper(
            &format!("inner-forest-sum-{tag}"),
            plain_all,
            2.0 * maximal_p,
        ));
        steps.push(StepRecord::upper(
            &format!("inner-maximal-{tag}"),
            maximal_p.powf(1.0 / p),
            pd * input.norms[i],
        ));
        let certified = (1.0 + 2.0 * (2.0f64.powf(p) + 1.0) * pd.powf(p)).powf(1.0 / p);
        steps.push(StepRecord::upper(
            &format!("inner-certified-{tag}"),
            i_inner[slot],
            certified * input.norms[i],
        ));
    }

    // Outer chain.
    {
        let sigma = sc;
        let pd = dual_exponent(pc);
        let mut halved = 0.0f64;
        let mut dominated = 0.0f64;
        for h in forest_c.cubes() {
            let avg_c = average(tree, &input.fs[c], sigma, h);
            let e_leaves = forest_c.exceptional_leaves(h)?;
            let e_mass: f64 = e_leaves.iter().map(|&l| sigma.leaf(l)).sum();
            halved += 2.0 * avg_c.powf(pc) * e_mass;
            dominated += e_leaves
                .iter()
                .map(|&l| input.maximal[c].get(l).powf(pc) * sigma.leaf(l))
                .sum::<f64>();
        }
        let maximal_p: f64 = input.maximal[c]
            .values()
            .iter()
            .zip(sigma.leaf_masses())
            .map(|(m, w)| m.powf(pc) * w)
            .sum();
        steps.push(StepRecord::upper("outer-halving", i_outer_sum, halved));
        steps.push(StepRecord::upper("outer-domination", halved, 2.0 * dominated));
        steps.push(StepRecord::upper("outer-disjointness", dominated, maximal_p));
        steps.push(StepRecord::upper(
            "outer-maximal",
            maximal_p.powf(1.0 / pc),
            pd * input.norms[c],
        ));
        steps.push(StepRecord::upper(
            "outer-certified",
            i_outer,
            2.0f64.powf(1.0 / pc) * pd * input.norms[c],
        ));
    }

    let pass = steps.iter().all(|s| s.pass);
    Ok(BlockCertificate {
        roles,
        group_count: groups.len(),
        cube_count,
        block_form,
        s_exponents: [sa, sb],
        i_inner,
        i_outer,
        beta_ratio,
        steps,
        bound,
        pass,
    })
}
