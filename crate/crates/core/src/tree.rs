//! Finite dyadic tree: a root cube subdivided `depth` times, every non-leaf
//! cube having 2^dimension children.
//!
//! Cubes are enumerated generation-major and path-lexicographically within a
//! generation; all reductions elsewhere in the crate run in this order so
//! floating-point results are reproducible.

use std::ops::Range;

use crate::error::{Error, Result};

/// Default cap on the number of leaves a tree may have.
pub const DEFAULT_LEAF_BUDGET: usize = 1 << 20;

/// Identifier of a cube in the fixed enumeration. Ordered by generation,
/// then lexicographically by child path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CubeId(pub(crate) usize);

impl CubeId {
    pub fn index(self) -> usize {
        self.0
    }
}

/// Complete dyadic tree of the given dimension and depth.
#[derive(Debug, Clone)]
pub struct DyadicTree {
    dimension: u32,
    depth: u32,
    arity: usize,
    /// `gen_offsets[k]` is the id of the first cube of generation k;
    /// the last entry is the total cube count.
    gen_offsets: Vec<usize>,
}

impl DyadicTree {
    /// Builds the complete tree, rejecting instances whose leaf count exceeds
    /// the default budget.
    pub fn build(dimension: u32, depth: u32) -> Result<Self> {
        Self::with_leaf_budget(dimension, depth, DEFAULT_LEAF_BUDGET)
    }

    pub fn with_leaf_budget(dimension: u32, depth: u32, budget: usize) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::InvalidDimension(dimension));
        }
        let bits = dimension as u128 * depth as u128;
        if bits >= 64 {
            return Err(Error::InstanceTooLarge {
                requested: u128::MAX,
                budget,
            });
        }
        let leaves: u128 = 1u128 << bits;
        if leaves > budget as u128 {
            return Err(Error::InstanceTooLarge {
                requested: leaves,
                budget,
            });
        }
        let arity = 1usize << dimension;
        let mut gen_offsets = Vec::with_capacity(depth as usize + 2);
        let mut offset = 0usize;
        let mut width = 1usize;
        for _ in 0..=depth {
            gen_offsets.push(offset);
            offset += width;
            width *= arity;
        }
        gen_offsets.push(offset);
        Ok(Self {
            dimension,
            depth,
            arity,
            gen_offsets,
        })
    }

    pub fn dimension(&self) -> u32 {
        self.dimension
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    /// Children per non-leaf cube: 2^dimension.
    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn cube_count(&self) -> usize {
        *self.gen_offsets.last().unwrap()
    }

    pub fn leaf_count(&self) -> usize {
        self.cube_count() - self.leaf_start()
    }

    fn leaf_start(&self) -> usize {
        self.gen_offsets[self.depth as usize]
    }

    pub fn root(&self) -> CubeId {
        CubeId(0)
    }

    pub fn generation(&self, q: CubeId) -> u32 {
        debug_assert!(q.0 < self.cube_count());
        // gen_offsets is sorted; partition_point gives the generation + 1.
        (self.gen_offsets.partition_point(|&o| o <= q.0) - 1) as u32
    }

    /// Index of the cube within its generation (its path read as a base-arity
    /// number, most significant digit first).
    pub fn offset_in_generation(&self, q: CubeId) -> usize {
        q.0 - self.gen_offsets[self.generation(q) as usize]
    }

    pub fn is_leaf(&self, q: CubeId) -> bool {
        q.0 >= self.leaf_start()
    }

    pub fn parent(&self, q: CubeId) -> Option<CubeId> {
        let k = self.generation(q);
        if k == 0 {
            return None;
        }
        let idx = self.offset_in_generation(q);
        Some(CubeId(self.gen_offsets[k as usize - 1] + idx / self.arity))
    }

    pub fn children(&self, q: CubeId) -> Range<usize> {
        if self.is_leaf(q) {
            return 0..0;
        }
        let k = self.generation(q) as usize;
        let idx = self.offset_in_generation(q);
        let first = self.gen_offsets[k + 1] + idx * self.arity;
        first..first + self.arity
    }

    pub fn child_ids(&self, q: CubeId) -> impl Iterator<Item = CubeId> {
        self.children(q).map(CubeId)
    }

    /// Leaf indices (0-based, in [0, leaf_count)) covered by `q`. Contiguous
    /// because the enumeration is path-lexicographic.
    pub fn leaf_span(&self, q: CubeId) -> Range<usize> {
        let k = self.generation(q);
        let idx = self.offset_in_generation(q);
        let shift = self.dimension * (self.depth - k);
        let width = 1usize << shift;
        idx * width..(idx + 1) * width
    }

    pub fn leaf_cube(&self, leaf_index: usize) -> CubeId {
        debug_assert!(leaf_index < self.leaf_count());
        CubeId(self.leaf_start() + leaf_index)
    }

    pub fn leaf_index(&self, q: CubeId) -> Option<usize> {
        self.is_leaf(q).then(|| q.0 - self.leaf_start())
    }

    /// All cubes in the deterministic enumeration order.
    pub fn cubes(&self) -> impl Iterator<Item = CubeId> {
        (0..self.cube_count()).map(CubeId)
    }

    /// True iff `inner` is contained in `outer` (inclusively). Dyadic cubes
    /// are nested or disjoint, so this is a path-prefix test.
    pub fn contains(&self, outer: CubeId, inner: CubeId) -> bool {
        let ko = self.generation(outer);
        let ki = self.generation(inner);
        if ko > ki {
            return false;
        }
        let shift = self.dimension * (ki - ko);
        self.offset_in_generation(inner) >> shift == self.offset_in_generation(outer)
    }

    /// The chain `q`, parent(q), ..., root.
    pub fn ancestors(&self, q: CubeId) -> impl Iterator<Item = CubeId> + '_ {
        let mut cur = Some(q);
        std::iter::from_fn(move || {
            let here = cur?;
            cur = self.parent(here);
            Some(here)
        })
    }

    /// Cubes contained in `q` (inclusive), in enumeration order.
    pub fn subtree(&self, q: CubeId) -> impl Iterator<Item = CubeId> + '_ {
        let k = self.generation(q);
        let idx = self.offset_in_generation(q);
        (k..=self.depth).flat_map(move |g| {
            let shift = self.dimension * (g - k);
            let width = 1usize << shift;
            let start = self.gen_offsets[g as usize] + idx * width;
            (start..start + width).map(CubeId)
        })
    }

    /// Child digits from the root down to `q`.
    pub fn path(&self, q: CubeId) -> Vec<u32> {
        let k = self.generation(q) as usize;
        let mut idx = self.offset_in_generation(q);
        let mut digits = vec![0u32; k];
        for d in digits.iter_mut().rev() {
            *d = (idx % self.arity) as u32;
            idx /= self.arity;
        }
        digits
    }

    /// Cube addressed by child digits from the root.
    pub fn cube_at(&self, path: &[u32]) -> Result<CubeId> {
        if path.len() > self.depth as usize {
            return Err(Error::CubeOutOfRange);
        }
        let mut idx = 0usize;
        for &d in path {
            if d as usize >= self.arity {
                return Err(Error::CubeOutOfRange);
            }
            idx = idx * self.arity + d as usize;
        }
        Ok(CubeId(self.gen_offsets[path.len()] + idx))
    }

    /// Side length 2^-generation of the unit root cube.
    pub fn side_length(&self, q: CubeId) -> f64 {
        0.5f64.powi(self.generation(q) as i32)
    }
}
