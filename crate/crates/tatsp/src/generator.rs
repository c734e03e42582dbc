//! Reproducible random-instance generator.
//!
//! Instances are built from `n` points drawn uniformly in a 5 km square: the
//! graph is the complete digraph with exact Euclidean base costs, and a
//! requested number of distinct trigger relations is sampled uniformly over
//! ordered pairs of distinct arcs. Relation costs are drawn relative to the
//! target arc's base cost `c` according to a scenario:
//!
//! - `Balanced`: uniform in `[c/2, 2c]`
//! - `Increase`: uniform in `[c, 2c]`
//! - `Decrease`: uniform in `[c/2, c]`
//!
//! The standard benchmark suite crosses the three scenarios with four sizes,
//! five relation-density factors and three replicas (180 instances), deriving
//! one child seed per instance so any slice can be regenerated independently.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::instance::{Arc, Instance, Relation};
use crate::seed::mix_seed;

/// Side length of the sampling square, in meters.
pub const SQUARE_SIDE: f64 = 5000.0;

/// Node counts used by the standard suite.
pub const SUITE_NODE_COUNTS: [usize; 4] = [10, 15, 20, 25];

/// Replicas per (scenario, size, density) cell in the standard suite.
pub const SUITE_REPLICAS: u64 = 3;

/// How relation costs relate to their target's base cost.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    Balanced,
    Increase,
    Decrease,
}

impl Scenario {
    pub const ALL: [Scenario; 3] = [Scenario::Balanced, Scenario::Increase, Scenario::Decrease];

    /// Inclusive sampling range for a relation cost given the target arc's
    /// base cost.
    pub fn cost_range(self, base: f64) -> (f64, f64) {
        match self {
            Scenario::Balanced => (base / 2.0, 2.0 * base),
            Scenario::Increase => (base, 2.0 * base),
            Scenario::Decrease => (base / 2.0, base),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Scenario::Balanced => "balanced",
            Scenario::Increase => "increase",
            Scenario::Decrease => "decrease",
        }
    }
}

impl std::str::FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "balanced" => Ok(Scenario::Balanced),
            "increase" => Ok(Scenario::Increase),
            "decrease" => Ok(Scenario::Decrease),
            other => Err(Error::Domain(format!(
                "unknown scenario {other:?} (expected balanced, increase or decrease)"
            ))),
        }
    }
}

/// Parameters of one generated instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RgSpec {
    pub scenario: Scenario,
    pub n: usize,
    pub relation_count: usize,
    pub seed: u64,
}

impl RgSpec {
    fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::Domain(format!(
                "generator needs at least 2 nodes, got {}",
                self.n
            )));
        }
        let m = self.n * (self.n - 1);
        let capacity = m * (m - 1);
        if self.relation_count > capacity {
            return Err(Error::Domain(format!(
                "{} relations requested but only {capacity} distinct ordered arc pairs exist",
                self.relation_count
            )));
        }
        Ok(())
    }
}

/// One suite cell: the spec plus its replica index within the cell.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SuiteEntry {
    pub spec: RgSpec,
    pub replica: u64,
}

impl SuiteEntry {
    /// Canonical file name for the generated instance.
    pub fn file_name(&self) -> String {
        format!(
            "rg_{}_n{}_r{}_rep{}.tatsp",
            self.spec.scenario.label(),
            self.spec.n,
            self.spec.relation_count,
            self.replica
        )
    }
}

/// Generates the instance a spec describes. The same spec always yields the
/// same instance, byte for byte once serialized.
pub fn generate_rg(spec: &RgSpec) -> Result<Instance> {
    spec.validate()?;
    let n = spec.n;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let points: Vec<(f64, f64)> = (0..n)
        .map(|_| (rng.gen_range(0.0..=SQUARE_SIDE), rng.gen_range(0.0..=SQUARE_SIDE)))
        .collect();

    let mut arcs = Vec::with_capacity(n * (n - 1));
    for tail in 0..n {
        for head in 0..n {
            if tail != head {
                let dx = points[tail].0 - points[head].0;
                let dy = points[tail].1 - points[head].1;
                arcs.push(Arc { tail, head, base_cost: (dx * dx + dy * dy).sqrt() });
            }
        }
    }

    let m = arcs.len();
    // Uniform sample of distinct ordered pairs of distinct arcs, drawn as
    // indices into the implicit pair space of size m * (m - 1).
    let pair_indices = rand::seq::index::sample(&mut rng, m * (m - 1), spec.relation_count);
    let mut relations = Vec::with_capacity(spec.relation_count);
    for idx in pair_indices {
        let trigger = idx / (m - 1);
        let rest = idx % (m - 1);
        let target = if rest < trigger { rest } else { rest + 1 };
        let (lo, hi) = spec.scenario.cost_range(arcs[target].base_cost);
        relations.push(Relation { trigger, target, cost: rng.gen_range(lo..=hi) });
    }

    Instance::new(
        format!("rg_{}_n{}_r{}_s{}", spec.scenario.label(), n, spec.relation_count, spec.seed),
        n,
        arcs,
        relations,
    )
}

/// Relation counts of the standard suite for a node count `n`:
/// `n/2` (rounded down), `2n`, `4n`, `8n` and `16n`.
pub fn suite_relation_counts(n: usize) -> [usize; 5] {
    [n / 2, 2 * n, 4 * n, 8 * n, 16 * n]
}

/// The 180 specs of the standard benchmark suite (3 scenarios x 4 sizes x
/// 5 densities x 3 replicas), each with a child seed derived from
/// `base_seed` and the cell's ordinal.
pub fn rg_suite(base_seed: u64) -> Vec<SuiteEntry> {
    let mut entries = Vec::with_capacity(180);
    let mut ordinal = 0u64;
    for scenario in Scenario::ALL {
        for &n in &SUITE_NODE_COUNTS {
            for relation_count in suite_relation_counts(n) {
                for replica in 0..SUITE_REPLICAS {
                    entries.push(SuiteEntry {
                        spec: RgSpec {
                            scenario,
                            n,
                            relation_count,
                            seed: mix_seed(base_seed, ordinal),
                        },
                        replica,
                    });
                    ordinal += 1;
                }
            }
        }
    }
    entries
}
