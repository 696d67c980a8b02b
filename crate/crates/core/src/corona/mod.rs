//! Stopping-time machinery: principal cubes, stopping parents, the grouped
//! decomposition of the cube sum, child subsets keyed through two forests,
//! and locally averaged (modified) functions.
//!
//! A forest's children are the maximal cubes whose average strictly exceeds
//! twice the parent average; ties do not spawn children. Stopping parents are
//! inclusive: the stopping parent of a forest cube is itself. The composed
//! membership test for `ch_subset` takes the *inner* parent strictly (the
//! smallest forest cube properly containing the child); with the inclusive
//! composition the defining observation fails whenever a stopping child of
//! one family happens to be a principal cube of another.

pub mod certificate;

pub use certificate::{verify_corona_certificate, BlockCertificate, CoronaCertificate, StepRecord};

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::measure::{average, cube_integrals, GridFunction, Measure};
use crate::tree::{CubeId, DyadicTree};

/// A family of principal cubes for one pair (f, sigma), with the derived
/// structure: per-cube stopping children, exceptional leaf sets, and the
/// construction levels.
#[derive(Debug, Clone)]
pub struct PrincipalForest {
    root: CubeId,
    /// Construction levels F^0, F^1, ...; level 0 is the root alone.
    levels: Vec<Vec<CubeId>>,
    nodes: BTreeMap<CubeId, ForestNode>,
}

#[derive(Debug, Clone)]
struct ForestNode {
    children: Vec<CubeId>,
    /// Leaf indices of the cube minus its children.
    exceptional: Vec<usize>,
}

impl PrincipalForest {
    pub fn root(&self) -> CubeId {
        self.root
    }

    pub fn contains(&self, q: CubeId) -> bool {
        self.nodes.contains_key(&q)
    }

    /// Forest cubes in enumeration order.
    pub fn cubes(&self) -> impl Iterator<Item = CubeId> + '_ {
        self.nodes.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn levels(&self) -> &[Vec<CubeId>] {
        &self.levels
    }

    /// Stopping children of a forest cube.
    pub fn children(&self, f: CubeId) -> Result<&[CubeId]> {
        self.nodes
            .get(&f)
            .map(|n| n.children.as_slice())
            .ok_or(Error::CubeOutOfRange)
    }

    /// Leaf indices of E(F) = F minus the union of its stopping children.
    pub fn exceptional_leaves(&self, f: CubeId) -> Result<&[usize]> {
        self.nodes
            .get(&f)
            .map(|n| n.exceptional.as_slice())
            .ok_or(Error::CubeOutOfRange)
    }

    /// Smallest forest cube containing `q` (inclusive).
    pub fn stopping_parent(&self, tree: &DyadicTree, q: CubeId) -> Result<CubeId> {
        if !tree.contains(self.root, q) {
            return Err(Error::CubeOutOfRange);
        }
        for a in tree.ancestors(q) {
            if self.contains(a) {
                return Ok(a);
            }
        }
        unreachable!("forest always contains its root")
    }

    /// Smallest forest cube properly containing `q`; `None` for the root.
    pub fn strict_stopping_parent(&self, tree: &DyadicTree, q: CubeId) -> Result<Option<CubeId>> {
        if !tree.contains(self.root, q) {
            return Err(Error::CubeOutOfRange);
        }
        match tree.parent(q) {
            None => Ok(None),
            Some(p) => {
                if !tree.contains(self.root, p) {
                    return Ok(None);
                }
                self.stopping_parent(tree, p).map(Some)
            }
        }
    }

    /// Builds the derived structure (children lists, exceptional sets,
    /// levels) for an arbitrary cube family containing `root`. Used by the
    /// stopping construction and by tests that need hand-made forests.
    pub(crate) fn from_cube_set(
        tree: &DyadicTree,
        root: CubeId,
        cubes: impl IntoIterator<Item = CubeId>,
    ) -> Self {
        let mut set: BTreeMap<CubeId, ForestNode> = BTreeMap::new();
        for q in cubes {
            set.insert(
                q,
                ForestNode {
                    children: Vec::new(),
                    exceptional: Vec::new(),
                },
            );
        }
        set.entry(root).or_insert(ForestNode {
            children: Vec::new(),
            exceptional: Vec::new(),
        });

        // Forest parent of each non-root member: nearest proper ancestor in
        // the set.
        let members: Vec<CubeId> = set.keys().copied().collect();
        let mut depths: BTreeMap<CubeId, usize> = BTreeMap::new();
        for &q in &members {
            depths.insert(q, 0);
        }
        for &q in &members {
            if q == root {
                continue;
            }
            let parent = tree
                .ancestors(q)
                .skip(1)
                .find(|a| set.contains_key(a))
                .expect("root is in the set");
            set.get_mut(&parent).unwrap().children.push(q);
            let d = depths[&parent] + 1;
            depths.insert(q, d);
        }
        for node in set.values_mut() {
            node.children.sort();
        }

        // Exceptional leaves: each leaf belongs to E of the smallest member
        // containing it.
        let mut owner: Vec<CubeId> = Vec::with_capacity(tree.leaf_span(root).len());
        for leaf in tree.leaf_span(root) {
            let lc = tree.leaf_cube(leaf);
            let holder = tree
                .ancestors(lc)
                .find(|a| set.contains_key(a))
                .expect("root contains every leaf below it");
            owner.push(holder);
        }
        for (offset, holder) in owner.into_iter().enumerate() {
            let leaf = tree.leaf_span(root).start + offset;
            set.get_mut(&holder).unwrap().exceptional.push(leaf);
        }

        let max_depth = depths.values().copied().max().unwrap_or(0);
        let mut levels = vec![Vec::new(); max_depth + 1];
        for (&q, &d) in &depths {
            levels[d].push(q);
        }
        PrincipalForest {
            root,
            levels,
            nodes: set,
        }
    }
}

/// The principal cubes of the pair (f, sigma) below `root`: starting from the
/// root, each generation adds the maximal cubes whose average strictly
/// exceeds twice the average over their stopping ancestor.
pub fn principal_cubes(
    tree: &DyadicTree,
    f: &GridFunction,
    sigma: &Measure,
    root: CubeId,
) -> PrincipalForest {
    let ints = cube_integrals(tree, f, sigma);
    let avg = |q: CubeId| {
        let m = sigma.of(q);
        if m > 0.0 {
            ints[q.index()] / m
        } else {
            0.0
        }
    };

    let mut cubes = vec![root];
    let mut frontier = vec![root];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for &f_cube in &frontier {
            let threshold = 2.0 * avg(f_cube);
            // Maximal descendants whose average exceeds the threshold.
            let mut stack: Vec<CubeId> = tree.child_ids(f_cube).collect();
            let mut found = Vec::new();
            while let Some(q) = stack.pop() {
                if avg(q) > threshold {
                    found.push(q);
                } else {
                    stack.extend(tree.child_ids(q));
                }
            }
            found.sort();
            next.extend(found);
        }
        cubes.extend(next.iter().copied());
        frontier = next;
    }
    PrincipalForest::from_cube_set(tree, root, cubes)
}

/// Spec'd accessor: the smallest forest cube containing `q`.
pub fn stopping_parent(
    tree: &DyadicTree,
    forest: &PrincipalForest,
    q: CubeId,
) -> Result<CubeId> {
    forest.stopping_parent(tree, q)
}

/// The grouped rewriting of the cube sum: every cube below the root keyed by
/// the triple of its stopping parents.
#[derive(Debug, Clone)]
pub struct GroupedDecomposition {
    pub groups: BTreeMap<[CubeId; 3], Vec<CubeId>>,
}

impl GroupedDecomposition {
    pub fn group_count(&self) -> usize {
        self.groups.len()
    }
}

pub fn grouped_decomposition(
    tree: &DyadicTree,
    forests: &[PrincipalForest; 3],
) -> Result<GroupedDecomposition> {
    let root = forests[0].root();
    let mut groups: BTreeMap<[CubeId; 3], Vec<CubeId>> = BTreeMap::new();
    for q in tree.subtree(root) {
        let key = [
            forests[0].stopping_parent(tree, q)?,
            forests[1].stopping_parent(tree, q)?,
            forests[2].stopping_parent(tree, q)?,
        ];
        groups.entry(key).or_default().push(q);
    }
    Ok(GroupedDecomposition { groups })
}

/// The subset of stopping children of `h` (in `forest_c`) whose composed
/// stopping parent comes back to `h`: the inner parent is taken strictly,
/// the outer one inclusively.
pub fn ch_subset(
    tree: &DyadicTree,
    forest_c: &PrincipalForest,
    forest_i: &PrincipalForest,
    h: CubeId,
) -> Result<Vec<CubeId>> {
    let children = forest_c.children(h)?;
    let mut out = Vec::new();
    for &child in children {
        let inner = forest_i.strict_stopping_parent(tree, child)?;
        let composed = match inner {
            Some(p) => forest_c.stopping_parent(tree, p)?,
            // No proper forest ancestor exists only above the root; the root
            // cannot be a stopping child, so this branch is unreachable for
            // well-formed forests.
            None => continue,
        };
        if composed == h {
            out.push(child);
        }
    }
    Ok(out)
}

/// f restricted to the exceptional set of `h` plus its averages on the given
/// children subset.
pub fn modified_function(
    tree: &DyadicTree,
    f: &GridFunction,
    sigma: &Measure,
    forest_c: &PrincipalForest,
    h: CubeId,
    ch_set: &[CubeId],
) -> Result<GridFunction> {
    let mut values = vec![0.0f64; tree.leaf_count()];
    for &leaf in forest_c.exceptional_leaves(h)? {
        values[leaf] = f.get(leaf);
    }
    for &child in ch_set {
        let a = average(tree, f, sigma, child);
        for leaf in tree.leaf_span(child) {
            values[leaf] = a;
        }
    }
    Ok(GridFunction::from_raw(values))
}
