//! Tour evaluation: full pricing of complete tours and incremental pricing of
//! partial tours under the trigger rule.
//!
//! The cost of an arc in a tour is its base cost unless some relation targets
//! it and that relation's trigger is the latest one traversed before it; then
//! the relation's replacement cost applies. Appending an arc to a partial
//! tour can therefore be priced exactly without touching earlier arcs — a new
//! arc never changes the cost of anything already placed — which is what
//! [`PartialState`] exploits. Local-search style tour edits do not share this
//! property, so edited tours are re-priced from scratch.

use crate::error::{Error, Result};
use crate::instance::{Instance, Tour};

/// Strict-improvement threshold shared by the descent loops and tests.
pub const COST_EPS: f64 = 1e-9;

/// Full pricing of one tour.
#[derive(Debug, Clone, PartialEq)]
pub struct TourEvaluation {
    /// Sum of `arc_costs`.
    pub total_cost: f64,
    /// Effective cost of the arc at each tour position (closing arc last).
    pub arc_costs: Vec<f64>,
    /// Per position, the relation that set the arc's cost, if any.
    pub active_relations: Vec<Option<usize>>,
}

/// Prices `tour` against `inst`, reporting per-arc effective costs and which
/// relation (if any) is active on each arc.
pub fn evaluate_tour(inst: &Instance, tour: &Tour) -> Result<TourEvaluation> {
    let nodes = tour.nodes();
    let n = nodes.len();

    let mut tour_arcs = Vec::with_capacity(n);
    let mut pos_of_arc = vec![usize::MAX; inst.arcs().len()];
    for p in 0..n {
        let tail = nodes[p];
        let head = nodes[(p + 1) % n];
        let arc = inst
            .arc_between(tail, head)
            .ok_or(Error::MissingArc { tail, head })?;
        tour_arcs.push(arc);
        pos_of_arc[arc] = p;
    }

    let mut arc_costs = Vec::with_capacity(n);
    let mut active_relations = Vec::with_capacity(n);
    for (p, &arc) in tour_arcs.iter().enumerate() {
        // The active relation is the one whose trigger sits at the highest
        // position strictly before the target.
        let mut active: Option<(usize, usize)> = None; // (trigger position, relation)
        for &r in inst.relations_targeting(arc) {
            let tp = pos_of_arc[inst.relations()[r].trigger];
            if tp != usize::MAX && tp < p && active.is_none_or(|(best, _)| tp > best) {
                active = Some((tp, r));
            }
        }
        match active {
            Some((_, r)) => {
                arc_costs.push(inst.relations()[r].cost);
                active_relations.push(Some(r));
            }
            None => {
                arc_costs.push(inst.arcs()[arc].base_cost);
                active_relations.push(None);
            }
        }
    }

    let total_cost = arc_costs.iter().sum();
    Ok(TourEvaluation { total_cost, arc_costs, active_relations })
}

/// Cost shift a relation applies to its target arc when active:
/// replacement cost minus the target's base cost.
pub fn delta_cost(inst: &Instance, relation: usize) -> f64 {
    let rel = &inst.relations()[relation];
    rel.cost - inst.arcs()[rel.target].base_cost
}

/// Relative gap of `cost` to `best_known`, in percent. Positive when `cost`
/// is worse.
pub fn gap(cost: f64, best_known: f64) -> Result<f64> {
    if best_known <= 0.0 {
        return Err(Error::Domain(format!(
            "gap needs a positive best-known cost, got {best_known}"
        )));
    }
    Ok(100.0 * (cost - best_known) / best_known)
}

/// A depot-rooted partial tour that prices each extension incrementally.
///
/// The state remembers, for every arc, the latest already-traversed trigger
/// targeting it, so the effective cost of the next arc is a single lookup.
/// Summing the extension costs plus [`PartialState::closing_cost`] telescopes
/// to exactly [`evaluate_tour`]'s total for the finished tour.
#[derive(Debug, Clone)]
pub struct PartialState {
    sequence: Vec<usize>,
    visited: Vec<bool>,
    running_cost: f64,
    /// Per arc: `(trigger position, relation)` of the latest trigger seen so
    /// far that targets it.
    last_trigger: Vec<Option<(usize, usize)>>,
}

impl PartialState {
    /// A fresh state holding only the depot.
    pub fn new(inst: &Instance) -> Self {
        let mut visited = vec![false; inst.node_count()];
        visited[0] = true;
        Self {
            sequence: vec![0],
            visited,
            running_cost: 0.0,
            last_trigger: vec![None; inst.arcs().len()],
        }
    }

    pub fn sequence(&self) -> &[usize] {
        &self.sequence
    }

    pub fn last_node(&self) -> usize {
        *self.sequence.last().expect("state always holds the depot")
    }

    pub fn is_visited(&self, node: usize) -> bool {
        self.visited[node]
    }

    pub fn is_complete(&self, inst: &Instance) -> bool {
        self.sequence.len() == inst.node_count()
    }

    /// Sum of the effective costs of the arcs placed so far.
    pub fn running_cost(&self) -> f64 {
        self.running_cost
    }

    /// Effective cost of extending to `next`, without changing the state.
    /// `None` when the required arc is missing.
    pub fn peek_extension_cost(&self, inst: &Instance, next: usize) -> Option<f64> {
        debug_assert!(!self.visited[next], "peeked extension revisits node {next}");
        let arc = inst.arc_between(self.last_node(), next)?;
        Some(match self.last_trigger[arc] {
            // Any recorded trigger lies strictly before the new arc.
            Some((_, r)) => inst.relations()[r].cost,
            None => inst.arcs()[arc].base_cost,
        })
    }

    /// Appends `next` and returns the exact cost the new arc contributes.
    /// Costs of previously placed arcs are unchanged by construction.
    pub fn extend(&mut self, inst: &Instance, next: usize) -> Result<f64> {
        assert!(!self.visited[next], "extension revisits node {next}");
        let last = self.last_node();
        let cost = self
            .peek_extension_cost(inst, next)
            .ok_or(Error::MissingArc { tail: last, head: next })?;

        let arc = inst.arc_between(last, next).expect("peek verified the arc");
        let position = self.sequence.len() - 1;
        for &r in inst.relations_triggered_by(arc) {
            // Positions only grow, so overwriting keeps the latest trigger.
            self.last_trigger[inst.relations()[r].target] = Some((position, r));
        }
        self.sequence.push(next);
        self.visited[next] = true;
        self.running_cost += cost;
        Ok(cost)
    }

    /// Effective cost of the closing arc back to the depot. Only valid once
    /// every node is placed.
    pub fn closing_cost(&self, inst: &Instance) -> Result<f64> {
        if !self.is_complete(inst) {
            return Err(Error::InvalidTour(format!(
                "cannot close a partial tour ({} of {} nodes placed)",
                self.sequence.len(),
                inst.node_count()
            )));
        }
        let last = self.last_node();
        let arc = inst
            .arc_between(last, 0)
            .ok_or(Error::MissingArc { tail: last, head: 0 })?;
        Ok(match self.last_trigger[arc] {
            Some((_, r)) => inst.relations()[r].cost,
            None => inst.arcs()[arc].base_cost,
        })
    }

    /// Finishes the tour, returning it with its exact total cost.
    pub fn finish(self, inst: &Instance) -> Result<(Tour, f64)> {
        let closing = self.closing_cost(inst)?;
        let tour = Tour::new(inst.node_count(), self.sequence)?;
        Ok((tour, self.running_cost + closing))
    }
}
