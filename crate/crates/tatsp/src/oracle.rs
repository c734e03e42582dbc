//! Ground-truth reference: a definitional tour evaluator and an exhaustive
//! optimum search.
//!
//! Everything here is written directly from the activation rule and shares no
//! evaluation code with the production evaluator, so the two can check each
//! other. A relation is active for a tour exactly when
//!
//! 1. its trigger and target arcs are both in the tour,
//! 2. the trigger is traversed before the target, and
//! 3. no other relation on the same target has its trigger traversed between
//!    the two.
//!
//! The exhaustive search enumerates complete cycles and prices each one with
//! the definitional evaluator — deliberately no pruning beyond skipping
//! missing arcs.

use std::thread;

use crate::error::{Error, Result};
use crate::instance::{Instance, Tour};

/// Largest instance `brute_force_optimum` accepts; (n-1)! cycles beyond this
/// are not worth enumerating.
pub const BRUTE_FORCE_NODE_LIMIT: usize = 10;

/// Outcome of the exhaustive search.
#[derive(Debug, Clone)]
pub struct OracleResult {
    pub best_tour: Tour,
    pub best_cost: f64,
    /// Number of complete (arc-feasible) cycles that were priced.
    pub enumerated: u64,
}

/// Literal scan state, reusable across many evaluations of one instance.
struct Definitional<'a> {
    inst: &'a Instance,
    /// Relation ids grouped by target arc, built from the raw relation list.
    by_target: Vec<Vec<usize>>,
    /// arc id -> tour position of its tail, valid where stamp matches.
    arc_pos: Vec<usize>,
    arc_stamp: Vec<u64>,
    stamp: u64,
}

impl<'a> Definitional<'a> {
    fn new(inst: &'a Instance) -> Self {
        let mut by_target = vec![Vec::new(); inst.arcs().len()];
        for (r, rel) in inst.relations().iter().enumerate() {
            by_target[rel.target].push(r);
        }
        Self {
            inst,
            by_target,
            arc_pos: vec![0; inst.arcs().len()],
            arc_stamp: vec![0; inst.arcs().len()],
            stamp: 0,
        }
    }

    /// Total cost of the cycle through `nodes`, or an error naming the first
    /// missing arc.
    fn evaluate(&mut self, nodes: &[usize]) -> Result<f64> {
        let n = nodes.len();
        self.stamp += 1;

        // Arc of every position; remember each arc's position.
        let mut tour_arcs = Vec::with_capacity(n);
        for p in 0..n {
            let tail = nodes[p];
            let head = nodes[(p + 1) % n];
            let arc = self
                .inst
                .arc_between(tail, head)
                .ok_or(Error::MissingArc { tail, head })?;
            self.arc_pos[arc] = p;
            self.arc_stamp[arc] = self.stamp;
            tour_arcs.push(arc);
        }

        let in_tour = |arc: usize| self.arc_stamp[arc] == self.stamp;
        let relations = self.inst.relations();

        let mut total = 0.0;
        for (p, &arc) in tour_arcs.iter().enumerate() {
            let mut cost = self.inst.arcs()[arc].base_cost;
            for &r in &self.by_target[arc] {
                let trigger = relations[r].trigger;
                // Condition 1: both arcs in the tour (the target is, by construction).
                if !in_tour(trigger) {
                    continue;
                }
                // Condition 2: trigger strictly before the target.
                let tp = self.arc_pos[trigger];
                if tp >= p {
                    continue;
                }
                // Condition 3: no later trigger for the same target in between.
                let overridden = self.by_target[arc].iter().any(|&other| {
                    let t2 = relations[other].trigger;
                    other != r && in_tour(t2) && self.arc_pos[t2] > tp && self.arc_pos[t2] < p
                });
                if !overridden {
                    cost = relations[r].cost;
                    break; // at most one relation can satisfy all three conditions
                }
            }
            total += cost;
        }
        Ok(total)
    }
}

/// Prices a tour straight from the activation rule. Slower than the
/// production evaluator but independent of it.
pub fn definitional_evaluate(inst: &Instance, tour: &Tour) -> Result<f64> {
    Definitional::new(inst).evaluate(tour.nodes())
}

/// Exhaustively enumerates Hamiltonian cycles (depot fixed first) in
/// lexicographic order and returns the cheapest; on cost ties the
/// lexicographically smallest tour wins. Fails with [`Error::NoFeasibleTour`]
/// when the graph admits no cycle at all.
pub fn brute_force_optimum(inst: &Instance) -> Result<OracleResult> {
    let n = inst.node_count();
    if n > BRUTE_FORCE_NODE_LIMIT {
        return Err(Error::TooLarge {
            what: "exhaustive search",
            limit: BRUTE_FORCE_NODE_LIMIT,
            actual: n,
        });
    }
    if n == 1 {
        return Err(Error::NoFeasibleTour);
    }

    // Split the work on the first hop. Branches are merged in ascending head
    // order, which reproduces the sequential lexicographic scan exactly.
    let first_hops: Vec<usize> = inst.out_arcs(0).iter().map(|&k| inst.arcs()[k].head).collect();
    let branches: Vec<Branch> = if first_hops.len() > 1 && n > 6 {
        thread::scope(|scope| {
            let handles: Vec<_> = first_hops
                .iter()
                .map(|&hop| scope.spawn(move || enumerate_branch(inst, hop)))
                .collect();
            handles.into_iter().map(|h| h.join().expect("oracle branch panicked")).collect()
        })
    } else {
        first_hops.iter().map(|&hop| enumerate_branch(inst, hop)).collect()
    };

    let mut best: Option<(f64, Vec<usize>)> = None;
    let mut enumerated = 0;
    for branch in branches {
        enumerated += branch.enumerated;
        if let Some((cost, nodes)) = branch.best {
            // Strict comparison keeps the first (lexicographically smaller) tour on ties.
            if best.as_ref().is_none_or(|(b, _)| cost < *b) {
                best = Some((cost, nodes));
            }
        }
    }
    match best {
        Some((best_cost, nodes)) => Ok(OracleResult {
            best_tour: Tour::new(n, nodes).expect("enumeration yields valid permutations"),
            best_cost,
            enumerated,
        }),
        None => Err(Error::NoFeasibleTour),
    }
}

struct Branch {
    best: Option<(f64, Vec<usize>)>,
    enumerated: u64,
}

/// Enumerates every cycle whose second node is `hop`.
fn enumerate_branch(inst: &Instance, hop: usize) -> Branch {
    let n = inst.node_count();
    let mut eval = Definitional::new(inst);
    let mut branch = Branch { best: None, enumerated: 0 };
    let mut visited = vec![false; n];
    visited[0] = true;
    visited[hop] = true;
    let mut nodes = vec![0, hop];
    extend(inst, &mut eval, &mut visited, &mut nodes, &mut branch);
    branch
}

fn extend(
    inst: &Instance,
    eval: &mut Definitional,
    visited: &mut [bool],
    nodes: &mut Vec<usize>,
    branch: &mut Branch,
) {
    let n = inst.node_count();
    let last = *nodes.last().expect("path is never empty");
    if nodes.len() == n {
        if inst.arc_between(last, 0).is_some() {
            let cost = eval.evaluate(nodes).expect("all arcs checked during extension");
            branch.enumerated += 1;
            if branch.best.as_ref().is_none_or(|(b, _)| cost < *b) {
                branch.best = Some((cost, nodes.clone()));
            }
        }
        return;
    }
    // Successors come back sorted by head id, keeping the scan lexicographic.
    for &arc in inst.out_arcs(last) {
        let next = inst.arcs()[arc].head;
        if !visited[next] {
            visited[next] = true;
            nodes.push(next);
            extend(inst, eval, visited, nodes, branch);
            nodes.pop();
            visited[next] = false;
        }
    }
}
