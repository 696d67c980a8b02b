//! Trilinear embedding constants on finite dyadic trees.
//!
//! The crate models a complete dyadic tree carrying a nonnegative kernel and
//! three leaf-atom measures, and provides:
//!
//! - the trilinear form and its dual bilinear positive operator;
//! - normalized kernel functions, discrete Wolff potentials and localized
//!   kernels;
//! - the full battery of testing constants (Sawyer-type and Wolff-type, per
//!   exponent-pair regime) whose maximum is the checking constant `c2`;
//! - a certified lower bound on the least embedding constant `c1` via
//!   alternating dual maximization with restarts, plus a grid-search oracle
//!   for tiny instances;
//! - a numerical replay of the stopping-time (corona) argument that records
//!   every inequality of the chain as a machine-checkable certificate;
//! - seeded instance generation, JSON formats and batch comparability
//!   studies.

pub mod corona;
pub mod error;
pub mod exponents;
pub mod extremizer;
pub mod instance;
pub mod kernel;
pub mod measure;
pub mod study;
pub mod testing;
pub mod tree;

pub use corona::{
    ch_subset, grouped_decomposition, modified_function, principal_cubes, stopping_parent,
    verify_corona_certificate, CoronaCertificate, GroupedDecomposition, PrincipalForest,
};
pub use error::{Error, Result};
pub use exponents::{classify_pair, dual_exponent, ExponentTriple, PairRegime};
pub use extremizer::{
    alternating_maximization, brute_force_constant, dual_optimal_function, estimate_c1,
    estimate_c1_with, single_cube_constant, ExtremizerResult,
};
pub use instance::{generate_instance, seeded_functions, InstanceSpec, KernelSpec, MeasureSpec};
pub use kernel::{
    bilinear_operator, localized_kernel, normalized_kernel_function, trilinear_form,
    wolff_potential, wolff_potential_fused, Instance, Kernel, SUBCUBE_SUMS_INCLUDE_TOP,
};
pub use measure::{
    average, cube_integrals, integrate, lp_norm, maximal_function, GridFunction, Measure,
};
pub use study::{run_study, StudyOptions, StudyReport};
pub use testing::{
    sawyer_pair_constants, theorem_battery, wolff_pair_constants, ConditionReport,
    DirectionConstant, PairEntry,
};
pub use tree::{CubeId, DyadicTree, DEFAULT_LEAF_BUDGET};
