//! Randomized tour construction.
//!
//! Two direct heuristics build tours arc by arc — uniformly random successor
//! choice, and greedy choice softened by a restricted candidate list priced
//! with the exact incremental evaluator. Three more first perturb the base
//! costs (additive or multiplicative noise, or relation-aware biased
//! penalties), hand the static matrix to the TSP sub-solver, and keep the
//! pool tour that prices best under the real trigger objective.
//!
//! Failures (dead ends, a missing closing arc, an empty sub-solver pool) are
//! ordinary values so that a search loop can count them and move on.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::eval::{evaluate_tour, PartialState};
use crate::instance::{Instance, Tour};
use crate::subsolver::{solve_pool, SubsolverConfig};

/// Per-arc static costs aligned with the instance's arc ids.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix {
    costs: Vec<f64>,
}

impl CostMatrix {
    pub fn new(costs: Vec<f64>) -> Self {
        debug_assert!(costs.iter().all(|c| c.is_finite()), "static costs must be finite");
        Self { costs }
    }

    /// The unperturbed base costs of an instance.
    pub fn base_costs(inst: &Instance) -> Self {
        Self::new(inst.arcs().iter().map(|a| a.base_cost).collect())
    }

    pub fn cost(&self, arc: usize) -> f64 {
        self.costs[arc]
    }

    pub fn len(&self) -> usize {
        self.costs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.costs.is_empty()
    }

    /// Static cost of a tour under this matrix; `None` if an arc is missing.
    pub fn tour_cost(&self, inst: &Instance, tour: &Tour) -> Option<f64> {
        tour.arc_ends()
            .map(|(tail, head)| inst.arc_between(tail, head).map(|k| self.costs[k]))
            .sum()
    }
}

/// A finished construction: the tour plus its exact objective value.
#[derive(Debug, Clone, PartialEq)]
pub struct Constructed {
    pub tour: Tour,
    pub cost: f64,
}

/// Why a construction attempt produced no tour. These are expected outcomes
/// on sparse graphs, not errors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ConstructionFailure {
    /// The partial tour reached a node with no unvisited out-neighbor.
    DeadEnd { node: usize },
    /// All nodes were placed but the last one cannot reach the depot.
    NoClosingArc { last_node: usize },
    /// The sub-solver found no tour at all.
    EmptyPool,
}

pub type ConstructionResult = std::result::Result<Constructed, ConstructionFailure>;

/// Restricted-candidate-list width as a fraction of the candidate set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RclParams {
    alpha: f64,
}

impl RclParams {
    /// `alpha` must lie in [0, 1]: 0 is pure greedy, 1 is uniformly random
    /// over all feasible successors.
    pub fn new(alpha: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::Domain(format!("RCL alpha must be in [0, 1], got {alpha}")));
        }
        Ok(Self { alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Number of candidates kept out of `feasible`: `ceil(alpha * feasible)`,
    /// at least one.
    pub fn list_size(&self, feasible: usize) -> usize {
        ((self.alpha * feasible as f64).ceil() as usize).clamp(1, feasible.max(1))
    }
}

/// Builds a tour by walking from the depot and picking each successor
/// uniformly among the unvisited out-neighbors.
pub fn simple_randomized<R: Rng>(inst: &Instance, rng: &mut R) -> ConstructionResult {
    let n = inst.node_count();
    let mut state = PartialState::new(inst);
    while state.sequence().len() < n {
        let last = state.last_node();
        let candidates: Vec<usize> = inst
            .out_arcs(last)
            .iter()
            .map(|&k| inst.arcs()[k].head)
            .filter(|&h| !state.is_visited(h))
            .collect();
        if candidates.is_empty() {
            return Err(ConstructionFailure::DeadEnd { node: last });
        }
        let next = candidates[rng.gen_range(0..candidates.len())];
        state.extend(inst, next).expect("candidate arcs exist");
    }
    finish(inst, state)
}

/// Greedy construction with a restricted candidate list: successors are
/// priced with the exact incremental cost, sorted ascending (ties to the
/// lowest node id), and one of the best `ceil(alpha * feasible)` is picked
/// uniformly. `alpha = 0` is deterministic pure greedy.
pub fn randomized_greedy<R: Rng>(inst: &Instance, params: RclParams, rng: &mut R) -> ConstructionResult {
    let n = inst.node_count();
    let mut state = PartialState::new(inst);
    while state.sequence().len() < n {
        let last = state.last_node();
        let mut candidates: Vec<(f64, usize)> = inst
            .out_arcs(last)
            .iter()
            .map(|&k| inst.arcs()[k].head)
            .filter(|&h| !state.is_visited(h))
            .map(|h| {
                let cost = state
                    .peek_extension_cost(inst, h)
                    .expect("out-neighbors are reachable");
                (cost, h)
            })
            .collect();
        if candidates.is_empty() {
            return Err(ConstructionFailure::DeadEnd { node: last });
        }
        candidates.sort_by(|(ca, ha), (cb, hb)| ca.total_cmp(cb).then_with(|| ha.cmp(hb)));
        let rcl = params.list_size(candidates.len());
        let (_, next) = candidates[rng.gen_range(0..rcl)];
        state.extend(inst, next).expect("candidate arcs exist");
    }
    finish(inst, state)
}

fn finish(inst: &Instance, state: PartialState) -> ConstructionResult {
    let last_node = state.last_node();
    match state.finish(inst) {
        Ok((tour, cost)) => Ok(Constructed { tour, cost }),
        Err(_) => Err(ConstructionFailure::NoClosingArc { last_node }),
    }
}

/// Base costs plus uniform noise: `c' = c + alpha * U(-1, 1)` per arc. With
/// `alpha = 0` the matrix is exactly the base costs. Small negative values
/// are possible and deliberate; the sub-solver tolerates them.
pub fn perturb_additive<R: Rng>(inst: &Instance, alpha: f64, rng: &mut R) -> CostMatrix {
    assert!(alpha >= 0.0, "additive noise amplitude must be non-negative");
    CostMatrix::new(
        inst.arcs()
            .iter()
            .map(|a| a.base_cost + alpha * rng.gen_range(-1.0..=1.0))
            .collect(),
    )
}

/// Base costs rescaled by independent random factors: `c' = c * beta * U(0, 1)`.
pub fn perturb_multiplicative<R: Rng>(inst: &Instance, beta: f64, rng: &mut R) -> CostMatrix {
    assert!(beta > 0.0, "multiplicative spread must be positive");
    CostMatrix::new(
        inst.arcs()
            .iter()
            .map(|a| a.base_cost * (beta * rng.gen_range(0.0..=1.0)))
            .collect(),
    )
}

/// Relation-aware perturbation: draws a random circular layout of the nodes
/// and pushes the two arcs of each relation up in proportion to how close the
/// relation's endpoints sit in that layout (see [`biased_penalties`]).
pub fn perturb_biased<R: Rng>(inst: &Instance, alpha: f64, beta: f64, rng: &mut R) -> CostMatrix {
    assert!(alpha >= 0.0, "penalty weight must be non-negative");
    let mut layout: Vec<usize> = (0..inst.node_count()).collect();
    layout.shuffle(rng);
    biased_penalties(inst, alpha, beta, &layout)
}

/// Deterministic core of [`perturb_biased`], taking the circular layout
/// explicitly.
///
/// With `pos` the node positions along the circle and `d(i, j)` the cyclic
/// distance `min(|pos_i - pos_j|, n - |pos_i - pos_j|)`, every arc gets a
/// proximity score `p_ij = 1 / d(i, j)`. A relation with trigger `(a1, a2)`,
/// target `(b1, b2)` and cost `c_r` scores
/// `p_r = p_a1a2 * p_b1b2 / max(1, d(a2, b1))^beta`, and `alpha * p_r * c_r`
/// is added to both of its arcs, accumulating over relations.
pub fn biased_penalties(inst: &Instance, alpha: f64, beta: f64, layout: &[usize]) -> CostMatrix {
    let n = inst.node_count();
    let mut pos = vec![0usize; n];
    for (idx, &node) in layout.iter().enumerate() {
        pos[node] = idx;
    }
    let cyclic = |i: usize, j: usize| {
        let d = pos[i].abs_diff(pos[j]);
        d.min(n - d)
    };
    let proximity = |tail: usize, head: usize| 1.0 / cyclic(tail, head) as f64;

    let mut costs: Vec<f64> = inst.arcs().iter().map(|a| a.base_cost).collect();
    for rel in inst.relations() {
        let trigger = inst.arcs()[rel.trigger];
        let target = inst.arcs()[rel.target];
        let coupling = cyclic(trigger.head, target.tail).max(1);
        let score = proximity(trigger.tail, trigger.head) * proximity(target.tail, target.head)
            / (coupling as f64).powf(beta);
        let penalty = alpha * score * rel.cost;
        costs[rel.trigger] += penalty;
        costs[rel.target] += penalty;
    }
    CostMatrix::new(costs)
}

/// Solves the static TSP on `cm`, prices every pool tour under the real
/// trigger objective and returns the best (first on ties).
pub fn mip_construction<R: Rng>(
    inst: &Instance,
    cm: &CostMatrix,
    cfg: &SubsolverConfig,
    rng: &mut R,
) -> ConstructionResult {
    let pool = solve_pool(inst, cm, cfg, rng);
    let mut best: Option<Constructed> = None;
    for (tour, _) in pool.iter() {
        let cost = evaluate_tour(inst, tour)
            .expect("sub-solver tours only use existing arcs")
            .total_cost;
        if best.as_ref().is_none_or(|b| cost < b.cost) {
            best = Some(Constructed { tour: tour.clone(), cost });
        }
    }
    best.ok_or(ConstructionFailure::EmptyPool)
}

/// The construction strategies a search run can use, with their parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ConstructionHeuristic {
    /// Uniform successor choice.
    SimpleRandomized,
    /// Restricted candidate list over exact incremental costs.
    RandomizedGreedy { alpha: f64 },
    /// Sub-solver over additively perturbed costs.
    MipAdditive { alpha: f64 },
    /// Sub-solver over multiplicatively perturbed costs.
    MipMultiplicative { beta: f64 },
    /// Sub-solver over relation-biased costs.
    MipBiased { alpha: f64, beta: f64 },
}

impl Default for ConstructionHeuristic {
    /// The strategy and parameters that perform best on the reference
    /// benchmark: biased perturbation with `alpha = 0.1`, `beta = 3`.
    fn default() -> Self {
        ConstructionHeuristic::MipBiased { alpha: 0.1, beta: 3.0 }
    }
}

impl ConstructionHeuristic {
    /// Runs one construction attempt.
    pub fn construct<R: Rng>(
        &self,
        inst: &Instance,
        subsolver: &SubsolverConfig,
        rng: &mut R,
    ) -> ConstructionResult {
        match *self {
            ConstructionHeuristic::SimpleRandomized => simple_randomized(inst, rng),
            ConstructionHeuristic::RandomizedGreedy { alpha } => {
                let params = RclParams::new(alpha).expect("validated at configuration time");
                randomized_greedy(inst, params, rng)
            }
            ConstructionHeuristic::MipAdditive { alpha } => {
                let cm = perturb_additive(inst, alpha, rng);
                mip_construction(inst, &cm, subsolver, rng)
            }
            ConstructionHeuristic::MipMultiplicative { beta } => {
                let cm = perturb_multiplicative(inst, beta, rng);
                mip_construction(inst, &cm, subsolver, rng)
            }
            ConstructionHeuristic::MipBiased { alpha, beta } => {
                let cm = perturb_biased(inst, alpha, beta, rng);
                mip_construction(inst, &cm, subsolver, rng)
            }
        }
    }

    /// Short stable label used in reports and benchmark tables.
    pub fn label(&self) -> &'static str {
        match self {
            ConstructionHeuristic::SimpleRandomized => "src",
            ConstructionHeuristic::RandomizedGreedy { .. } => "rgc",
            ConstructionHeuristic::MipAdditive { .. } => "mip-add",
            ConstructionHeuristic::MipMultiplicative { .. } => "mip-mul",
            ConstructionHeuristic::MipBiased { .. } => "mip-bias",
        }
    }

    /// Validates the embedded parameters.
    pub fn validate(&self) -> Result<()> {
        match *self {
            ConstructionHeuristic::SimpleRandomized => Ok(()),
            ConstructionHeuristic::RandomizedGreedy { alpha } => RclParams::new(alpha).map(|_| ()),
            ConstructionHeuristic::MipAdditive { alpha } if alpha < 0.0 => Err(Error::Domain(
                format!("additive noise amplitude must be non-negative, got {alpha}"),
            )),
            ConstructionHeuristic::MipMultiplicative { beta } if beta <= 0.0 => Err(Error::Domain(
                format!("multiplicative spread must be positive, got {beta}"),
            )),
            ConstructionHeuristic::MipBiased { alpha, .. } if alpha < 0.0 => Err(Error::Domain(
                format!("penalty weight must be non-negative, got {alpha}"),
            )),
            _ => Ok(()),
        }
    }
}
