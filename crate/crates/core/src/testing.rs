//! Checking constants: the bilinear pair conditions (Sawyer and Wolff kinds)
//! and the full per-permutation battery with localized kernels.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponents::{classify_pair, dual_exponent, PairRegime};
use crate::kernel::{localized_kernel, wolff_potential_fused, Instance, Kernel};
use crate::measure::{lp_norm, GridFunction, Measure};
use crate::tree::{CubeId, DyadicTree};

/// One directed checking constant: the supremum over cubes of a quotient,
/// with the cube attaining it.
#[derive(Debug, Clone)]
pub struct DirectionConstant {
    /// The supremum; +inf when the direction is infeasible.
    pub constant: f64,
    /// Cube attaining the supremum (smallest id among ties), if any quotient
    /// was positive.
    pub witness: Option<CubeId>,
    /// Set when some cube has a positive numerator over a null denominator.
    pub infeasible: bool,
    /// Sawyer regime only: the dual-extremal test function of the witness.
    pub extremal: Option<GridFunction>,
}

impl DirectionConstant {
    fn zero() -> Self {
        Self {
            constant: 0.0,
            witness: None,
            infeasible: false,
            extremal: None,
        }
    }
}

/// Battery entry for one unordered pair {a, b} with complement c.
#[derive(Debug, Clone)]
pub struct PairEntry {
    /// 0-based indices (a, b).
    pub pair: (usize, usize),
    pub complement: usize,
    pub regime: PairRegime,
    /// Direction with sigma_a inside the sum and the norm in sigma_b.
    pub forward: DirectionConstant,
    /// Roles of a and b swapped.
    pub reverse: DirectionConstant,
}

/// All six directed conditions (three pairs, two directions each).
#[derive(Debug, Clone)]
pub struct ConditionReport {
    pub entries: Vec<PairEntry>,
    /// Maximum of all directed constants.
    pub c2: f64,
    pub infeasible: bool,
}

impl ConditionReport {
    pub fn directions(&self) -> impl Iterator<Item = (&PairEntry, bool, &DirectionConstant)> {
        self.entries.iter().flat_map(|e| {
            [(e, false, &e.forward), (e, true, &e.reverse)]
        })
    }

    /// Directed Sawyer entries with a usable witness, as
    /// (inner index a, norm index b, complement c, witness, extremal).
    pub fn sawyer_witnesses(
        &self,
    ) -> impl Iterator<Item = (usize, usize, usize, CubeId, &GridFunction)> {
        self.entries.iter().flat_map(|e| {
            let mut out = Vec::new();
            if e.regime.is_sawyer() {
                if let (Some(w), Some(x)) = (e.forward.witness, e.forward.extremal.as_ref()) {
                    out.push((e.pair.0, e.pair.1, e.complement, w, x));
                }
                if let (Some(w), Some(x)) = (e.reverse.witness, e.reverse.extremal.as_ref()) {
                    out.push((e.pair.1, e.pair.0, e.complement, w, x));
                }
            }
            out
        })
    }
}

/// Quotient of a testing numerator over a testing denominator, with the null
/// conventions: 0/0 contributes 0, positive/0 is infeasible.
fn testing_quotient(num: f64, den: f64) -> (f64, bool) {
    if den > 0.0 {
        (num / den, false)
    } else if num > 0.0 {
        (f64::INFINITY, true)
    } else {
        (0.0, false)
    }
}

/// Chain sums below `q`: at each leaf of `q`, the sum of
/// `weight(Q') * sigma_in(Q')` over cubes Q' between `q` and the leaf.
fn chain_sums(
    tree: &DyadicTree,
    weight: &impl Fn(CubeId) -> f64,
    sigma_in: &Measure,
    q: CubeId,
    acc_above: f64,
    out: &mut Vec<(usize, f64)>,
) {
    let acc = acc_above + weight(q) * sigma_in.of(q);
    if let Some(leaf) = tree.leaf_index(q) {
        out.push((leaf, acc));
    } else {
        for c in tree.child_ids(q) {
            chain_sums(tree, weight, sigma_in, c, acc, out);
        }
    }
}

/// Supremum over cubes of the Sawyer-type quotient
///
/// ```text
/// || sum_{Q' <= Q} w(Q') sigma_in(Q') 1_{Q'} ||_{L^{p_out'}(sigma_out | Q)}
/// ---------------------------------------------------------------------
///        sigma_in(Q)^{1/p_in} * den_extra(Q)
/// ```
fn sawyer_direction_sup(
    tree: &DyadicTree,
    weight: &(impl Fn(CubeId) -> f64 + Sync),
    sigma_in: &Measure,
    p_in: f64,
    sigma_out: &Measure,
    p_out: f64,
    den_extra: &(impl Fn(CubeId) -> f64 + Sync),
) -> DirectionConstant {
    let p_out_dual = dual_exponent(p_out);
    let candidates: Vec<(f64, bool)> = tree
        .cubes()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&q| {
            let mut sums = Vec::new();
            chain_sums(tree, weight, sigma_in, q, 0.0, &mut sums);
            let raised: f64 = sums
                .iter()
                .map(|&(leaf, acc)| acc.powf(p_out_dual) * sigma_out.leaf(leaf))
                .sum();
            let num = raised.powf(1.0 / p_out_dual);
            let den = sigma_in.of(q).powf(1.0 / p_in) * den_extra(q);
            testing_quotient(num, den)
        })
        .collect();

    let mut best = DirectionConstant::zero();
    for (q, (quotient, infeasible)) in tree.cubes().zip(candidates) {
        if infeasible {
            best.infeasible = true;
            best.constant = f64::INFINITY;
            best.witness = Some(q);
            break;
        }
        if quotient > best.constant {
            best.constant = quotient;
            best.witness = Some(q);
        }
    }

    if let Some(w) = best.witness {
        if !best.infeasible {
            // Dual-extremal test function of the witnessing cube.
            let mut sums = Vec::new();
            chain_sums(tree, weight, sigma_in, w, 0.0, &mut sums);
            let mut psi = vec![0.0; tree.leaf_count()];
            for (leaf, acc) in sums {
                psi[leaf] = acc;
            }
            let psi = GridFunction::from_raw(psi);
            if let Ok((f, _)) = crate::extremizer::dual_optimal_function(&psi, sigma_out, p_out) {
                best.extremal = Some(f);
            }
        }
    }
    best
}

/// The two Sawyer checking constants of the pair
/// ((sigma_a, p_a), (sigma_b, p_b)) for a plain kernel, with witnesses.
pub fn sawyer_pair_constants(
    tree: &DyadicTree,
    kernel: &Kernel,
    sigma_a: &Measure,
    p_a: f64,
    sigma_b: &Measure,
    p_b: f64,
) -> (DirectionConstant, DirectionConstant) {
    let w = |q: CubeId| kernel.get(q);
    let one = |_: CubeId| 1.0;
    (
        sawyer_direction_sup(tree, &w, sigma_a, p_a, sigma_b, p_b, &one),
        sawyer_direction_sup(tree, &w, sigma_b, p_b, sigma_a, p_a, &one),
    )
}

/// The two Wolff checking constants of the pair for a plain kernel: L^r norms
/// of the 1/p'-th powers of the two discrete Wolff potentials.
pub fn wolff_pair_constants(
    tree: &DyadicTree,
    kernel: &Kernel,
    sigma_a: &Measure,
    p_a: f64,
    sigma_b: &Measure,
    p_b: f64,
) -> Result<(f64, f64)> {
    let r = match classify_pair(p_a, p_b)? {
        PairRegime::Wolff { r } => r,
        PairRegime::Sawyer => {
            return Err(Error::InvalidValue(
                "wolff_pair_constants called on a Sawyer-regime pair".to_string(),
            ))
        }
    };
    let first = wolff_direction(tree, kernel, sigma_a, sigma_b, p_b, r);
    let second = wolff_direction(tree, kernel, sigma_b, sigma_a, p_a, r);
    Ok((first, second))
}

fn wolff_direction(
    tree: &DyadicTree,
    kernel: &Kernel,
    sigma_a: &Measure,
    sigma_b: &Measure,
    p_b: f64,
    r: f64,
) -> f64 {
    let pbd = dual_exponent(p_b);
    let w = wolff_potential_fused(pbd, tree, kernel, sigma_b, sigma_a);
    let rooted = GridFunction::from_raw(w.values().iter().map(|v| v.powf(1.0 / pbd)).collect());
    lp_norm(&rooted, sigma_a, r)
}

/// The full battery: for every unordered pair {a, b} with complement c, both
/// directed conditions built from the kernel localized at each cube by
/// sigma_c, normalized by sigma_a(Q)^{1/p_a} sigma_c(Q)^{1/p_c} (Sawyer) or
/// sigma_c(Q)^{1/p_c} (Wolff). c2 is the maximum over all six.
pub fn theorem_battery(inst: &Instance) -> ConditionReport {
    let tree = inst.tree();
    let kernel = inst.kernel();
    let exps = inst.exponents();
    let mut entries = Vec::with_capacity(3);
    for (a, b, c) in [(0usize, 1usize, 2usize), (0, 2, 1), (1, 2, 0)] {
        let sc = inst.measure(c);
        let pc = exps.p(c);
        let regime = exps.pair_regime(a, b);
        let (forward, reverse) = match regime {
            PairRegime::Sawyer => {
                let w = |q: CubeId| kernel.get(q) * sc.of(q);
                let den = |q: CubeId| sc.of(q).powf(1.0 / pc);
                (
                    sawyer_direction_sup(
                        tree,
                        &w,
                        inst.measure(a),
                        exps.p(a),
                        inst.measure(b),
                        exps.p(b),
                        &den,
                    ),
                    sawyer_direction_sup(
                        tree,
                        &w,
                        inst.measure(b),
                        exps.p(b),
                        inst.measure(a),
                        exps.p(a),
                        &den,
                    ),
                )
            }
            PairRegime::Wolff { r } => {
                let candidates: Vec<(f64, bool, f64, bool)> = tree
                    .cubes()
                    .collect::<Vec<_>>()
                    .par_iter()
                    .map(|&q| {
                        let loc = localized_kernel(tree, kernel, q, sc);
                        let fwd = wolff_direction(
                            tree,
                            &loc,
                            inst.measure(a),
                            inst.measure(b),
                            exps.p(b),
                            r,
                        );
                        let rev = wolff_direction(
                            tree,
                            &loc,
                            inst.measure(b),
                            inst.measure(a),
                            exps.p(a),
                            r,
                        );
                        let den = sc.of(q).powf(1.0 / pc);
                        let (qf, inf_f) = testing_quotient(fwd, den);
                        let (qr, inf_r) = testing_quotient(rev, den);
                        (qf, inf_f, qr, inf_r)
                    })
                    .collect();
                let mut forward = DirectionConstant::zero();
                let mut reverse = DirectionConstant::zero();
                for (q, (qf, inf_f, qr, inf_r)) in tree.cubes().zip(candidates) {
                    if inf_f && !forward.infeasible {
                        forward.infeasible = true;
                        forward.constant = f64::INFINITY;
                        forward.witness = Some(q);
                    } else if !forward.infeasible && qf > forward.constant {
                        forward.constant = qf;
                        forward.witness = Some(q);
                    }
                    if inf_r && !reverse.infeasible {
                        reverse.infeasible = true;
                        reverse.constant = f64::INFINITY;
                        reverse.witness = Some(q);
                    } else if !reverse.infeasible && qr > reverse.constant {
                        reverse.constant = qr;
                        reverse.witness = Some(q);
                    }
                }
                (forward, reverse)
            }
        };
        entries.push(PairEntry {
            pair: (a, b),
            complement: c,
            regime,
            forward,
            reverse,
        });
    }
    let infeasible = entries
        .iter()
        .any(|e| e.forward.infeasible || e.reverse.infeasible);
    let c2 = entries
        .iter()
        .flat_map(|e| [e.forward.constant, e.reverse.constant])
        .fold(0.0f64, f64::max);
    ConditionReport {
        entries,
        c2,
        infeasible,
    }
}

/// Serialization-friendly form of a battery report: witnesses as paths,
/// infinite constants as nulls.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConditionReportDoc {
    pub entries: Vec<PairEntryDoc>,
    pub c2: Option<f64>,
    pub infeasible: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairEntryDoc {
    pub pair: [usize; 2],
    pub complement: usize,
    pub regime: PairRegime,
    pub forward: DirectionDoc,
    pub reverse: DirectionDoc,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DirectionDoc {
    pub constant: Option<f64>,
    pub infeasible: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extremal: Option<Vec<f64>>,
}

fn finite_or_none(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

impl ConditionReport {
    pub fn to_doc(&self, tree: &DyadicTree) -> ConditionReportDoc {
        let dir = |d: &DirectionConstant| DirectionDoc {
            constant: finite_or_none(d.constant),
            infeasible: d.infeasible,
            witness: d.witness.map(|w| tree.path(w)),
            extremal: d.extremal.as_ref().map(|f| f.values().to_vec()),
        };
        ConditionReportDoc {
            entries: self
                .entries
                .iter()
                .map(|e| PairEntryDoc {
                    pair: [e.pair.0, e.pair.1],
                    complement: e.complement,
                    regime: e.regime,
                    forward: dir(&e.forward),
                    reverse: dir(&e.reverse),
                })
                .collect(),
            c2: finite_or_none(self.c2),
            infeasible: self.infeasible,
        }
    }
}
