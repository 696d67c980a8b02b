//! Instance specs: the on-disk description of a problem, its seeded
//! generators, and JSON round-tripping.
//!
//! A spec is a single JSON document; value arrays are ordered by the
//! deterministic cube/leaf enumeration. Generation is a pure function of the
//! spec, so materializing the same spec twice yields identical bytes.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponents::ExponentTriple;
use crate::kernel::{Instance, Kernel};
use crate::measure::Measure;
use crate::tree::DyadicTree;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum KernelSpec {
    /// One value per cube, enumeration order.
    Explicit { values: Vec<f64> },
    /// Independent uniform [0, 1) per cube.
    Uniform {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
    /// side(Q)^alpha.
    Homogeneous { alpha: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MeasureSpec {
    /// One mass per leaf, enumeration order.
    Explicit { values: Vec<f64> },
    /// Independent uniform [0, 1) per leaf.
    Uniform {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
    /// Each leaf carries uniform mass with probability `density`, else zero.
    Sparse {
        density: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub version: u32,
    pub n: u32,
    #[serde(rename = "L")]
    pub depth: u32,
    pub p: [f64; 3],
    pub kernel: KernelSpec,
    pub measures: [MeasureSpec; 3],
    pub seed: u64,
}

impl InstanceSpec {
    /// Spec with uniform random kernel and measures.
    pub fn random(n: u32, depth: u32, p: [f64; 3], seed: u64) -> Self {
        Self {
            version: FORMAT_VERSION,
            n,
            depth,
            p,
            kernel: KernelSpec::Uniform { seed: None },
            measures: [
                MeasureSpec::Uniform { seed: None },
                MeasureSpec::Uniform { seed: None },
                MeasureSpec::Uniform { seed: None },
            ],
            seed,
        }
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("spec serializes");
        out.push('\n');
        out
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: InstanceSpec = serde_json::from_str(text)?;
        if spec.version != FORMAT_VERSION {
            return Err(Error::Spec(format!(
                "unsupported format version {}",
                spec.version
            )));
        }
        Ok(spec)
    }

    /// Same instance with every generator replaced by its explicit values.
    pub fn materialize(&self) -> Result<InstanceSpec> {
        let inst = generate_instance(self)?;
        Ok(InstanceSpec {
            version: FORMAT_VERSION,
            n: self.n,
            depth: self.depth,
            p: self.p,
            kernel: KernelSpec::Explicit {
                values: inst.kernel().values().to_vec(),
            },
            measures: [0, 1, 2].map(|i| MeasureSpec::Explicit {
                values: inst.measure(i).leaf_masses().to_vec(),
            }),
            seed: self.seed,
        })
    }
}

fn component_rng(global_seed: u64, component_seed: Option<u64>, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(component_seed.unwrap_or(global_seed));
    rng.set_stream(stream);
    rng
}

/// Three seeded nonnegative functions with uniform [0, 1) leaf values, used
/// for certificate replays and form evaluation.
pub fn seeded_functions(tree: &DyadicTree, seed: u64) -> [crate::measure::GridFunction; 3] {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    [(); 3].map(|_| {
        crate::measure::GridFunction::from_values(
            tree,
            (0..tree.leaf_count()).map(|_| rng.gen::<f64>()).collect(),
        )
        .expect("finite values")
    })
}

/// Builds the instance described by the spec. Deterministic per seed.
pub fn generate_instance(spec: &InstanceSpec) -> Result<Instance> {
    let tree = DyadicTree::build(spec.n, spec.depth)?;
    let exponents = ExponentTriple::from_array(spec.p)?;

    let kernel = match &spec.kernel {
        KernelSpec::Explicit { values } => Kernel::from_values(&tree, values.clone())?,
        KernelSpec::Uniform { seed } => {
            let mut rng = component_rng(spec.seed, *seed, 0);
            Kernel::from_values(
                &tree,
                (0..tree.cube_count()).map(|_| rng.gen::<f64>()).collect(),
            )?
        }
        KernelSpec::Homogeneous { alpha } => {
            if !alpha.is_finite() {
                return Err(Error::Spec(format!("alpha {alpha} is not finite")));
            }
            Kernel::from_values(
                &tree,
                tree.cubes()
                    .map(|q| 2.0f64.powf(-(tree.generation(q) as f64) * alpha))
                    .collect(),
            )?
        }
    };

    let mut measures = Vec::with_capacity(3);
    for (i, mspec) in spec.measures.iter().enumerate() {
        let stream = i as u64 + 1;
        let measure = match mspec {
            MeasureSpec::Explicit { values } => Measure::from_leaf_masses(&tree, values.clone())?,
            MeasureSpec::Uniform { seed } => {
                let mut rng = component_rng(spec.seed, *seed, stream);
                Measure::from_leaf_masses(
                    &tree,
                    (0..tree.leaf_count()).map(|_| rng.gen::<f64>()).collect(),
                )?
            }
            MeasureSpec::Sparse { density, seed } => {
                if !(0.0..=1.0).contains(density) {
                    return Err(Error::Spec(format!(
                        "sparse density {density} must lie in [0, 1]"
                    )));
                }
                let mut rng = component_rng(spec.seed, *seed, stream);
                Measure::from_leaf_masses(
                    &tree,
                    (0..tree.leaf_count())
                        .map(|_| {
                            let roll: f64 = rng.gen();
                            let mass: f64 = rng.gen();
                            if roll < *density {
                                mass
                            } else {
                                0.0
                            }
                        })
                        .collect(),
                )?
            }
        };
        measures.push(measure);
    }
    let measures: [Measure; 3] = measures.try_into().expect("three measures");
    Instance::new(tree, kernel, measures, exponents)
}
