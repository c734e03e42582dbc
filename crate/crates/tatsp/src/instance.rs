//! Core data model: instances (arcs plus trigger relations) and tours.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};

/// A directed arc with its base traversal cost.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Arc {
    pub tail: usize,
    pub head: usize,
    pub base_cost: f64,
}

/// A trigger/target pair: once the trigger arc has been traversed, the target
/// arc costs `cost` instead of its base cost (the latest trigger before the
/// target wins).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Relation {
    /// Index of the trigger arc.
    pub trigger: usize,
    /// Index of the target arc.
    pub target: usize,
    /// Replacement cost of the target arc while this relation is active.
    pub cost: f64,
}

/// A problem instance: a directed graph on nodes `0..node_count` (node 0 is
/// the depot) plus a list of trigger relations between arcs.
///
/// Arc and relation indices are positions in the vectors handed to
/// [`Instance::new`]; they are stable for the lifetime of the instance and
/// are the ids used everywhere else in the crate.
#[derive(Debug, Clone)]
pub struct Instance {
    name: String,
    node_count: usize,
    arcs: Vec<Arc>,
    relations: Vec<Relation>,
    arc_index: HashMap<(usize, usize), usize>,
    /// Per node, arc indices leaving it, sorted by head id.
    out_arcs: Vec<Vec<usize>>,
    /// Per arc, indices of relations that target it, in relation-id order.
    relations_by_target: Vec<Vec<usize>>,
    /// Per arc, indices of relations it triggers, in relation-id order.
    relations_by_trigger: Vec<Vec<usize>>,
}

impl Instance {
    /// Validates the raw data and builds the lookup tables.
    pub fn new(
        name: impl Into<String>,
        node_count: usize,
        arcs: Vec<Arc>,
        relations: Vec<Relation>,
    ) -> Result<Self> {
        if node_count == 0 {
            return Err(Error::InvalidInstance("node count must be positive".into()));
        }
        let mut arc_index = HashMap::with_capacity(arcs.len());
        for (k, a) in arcs.iter().enumerate() {
            if a.tail >= node_count || a.head >= node_count {
                return Err(Error::InvalidInstance(format!(
                    "arc {k} ({}, {}) references an unknown node ({node_count} nodes)",
                    a.tail, a.head
                )));
            }
            if a.tail == a.head {
                return Err(Error::InvalidInstance(format!(
                    "arc {k} is a self loop on node {}",
                    a.tail
                )));
            }
            if !a.base_cost.is_finite() || a.base_cost < 0.0 {
                return Err(Error::InvalidInstance(format!(
                    "arc {k} has a negative or non-finite cost"
                )));
            }
            if arc_index.insert((a.tail, a.head), k).is_some() {
                return Err(Error::InvalidInstance(format!(
                    "duplicate arc ({}, {})",
                    a.tail, a.head
                )));
            }
        }
        let mut seen_pairs = HashMap::with_capacity(relations.len());
        for (r, rel) in relations.iter().enumerate() {
            if rel.trigger >= arcs.len() || rel.target >= arcs.len() {
                return Err(Error::InvalidInstance(format!(
                    "relation {r} references an unknown arc ({} arcs)",
                    arcs.len()
                )));
            }
            if rel.trigger == rel.target {
                return Err(Error::InvalidInstance(format!(
                    "relation {r} has the same trigger and target arc"
                )));
            }
            if !rel.cost.is_finite() || rel.cost < 0.0 {
                return Err(Error::InvalidInstance(format!(
                    "relation {r} has a negative or non-finite cost"
                )));
            }
            if seen_pairs.insert((rel.trigger, rel.target), r).is_some() {
                return Err(Error::InvalidInstance(format!(
                    "duplicate relation ({}, {})",
                    rel.trigger, rel.target
                )));
            }
        }

        let mut out_arcs = vec![Vec::new(); node_count];
        for (k, a) in arcs.iter().enumerate() {
            out_arcs[a.tail].push(k);
        }
        for list in &mut out_arcs {
            list.sort_by_key(|&k| arcs[k].head);
        }
        let mut relations_by_target = vec![Vec::new(); arcs.len()];
        let mut relations_by_trigger = vec![Vec::new(); arcs.len()];
        for (r, rel) in relations.iter().enumerate() {
            relations_by_target[rel.target].push(r);
            relations_by_trigger[rel.trigger].push(r);
        }

        Ok(Self {
            name: name.into(),
            node_count,
            arcs,
            relations,
            arc_index,
            out_arcs,
            relations_by_target,
            relations_by_trigger,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    /// Index of the arc from `tail` to `head`, if the instance has it.
    pub fn arc_between(&self, tail: usize, head: usize) -> Option<usize> {
        self.arc_index.get(&(tail, head)).copied()
    }

    /// Arc indices leaving `node`, sorted by head id.
    pub fn out_arcs(&self, node: usize) -> &[usize] {
        &self.out_arcs[node]
    }

    /// Relations whose target is `arc`, in relation-id order.
    pub fn relations_targeting(&self, arc: usize) -> &[usize] {
        &self.relations_by_target[arc]
    }

    /// Relations whose trigger is `arc`, in relation-id order.
    pub fn relations_triggered_by(&self, arc: usize) -> &[usize] {
        &self.relations_by_trigger[arc]
    }

    /// Checks that every consecutive arc of `tour` (including the closing
    /// arc back to the depot) exists in the instance.
    pub fn validate_tour_arcs(&self, tour: &Tour) -> Result<()> {
        let nodes = tour.nodes();
        for p in 0..nodes.len() {
            let tail = nodes[p];
            let head = nodes[(p + 1) % nodes.len()];
            if self.arc_between(tail, head).is_none() {
                return Err(Error::MissingArc { tail, head });
            }
        }
        Ok(())
    }
}

/// A Hamiltonian cycle, stored as the visiting order of all nodes starting at
/// the depot. The closing arc back to node 0 is implicit.
///
/// The type guarantees the sequence is a permutation of `0..node_count` that
/// starts at 0; whether each consecutive arc exists is a property of a
/// specific instance and is checked by the evaluators (and by
/// [`Instance::validate_tour_arcs`]).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Tour {
    nodes: Vec<usize>,
}

impl Tour {
    pub fn new(node_count: usize, nodes: Vec<usize>) -> Result<Self> {
        if nodes.len() != node_count {
            return Err(Error::InvalidTour(format!(
                "sequence visits {} of {node_count} nodes",
                nodes.len()
            )));
        }
        if nodes.first() != Some(&0) {
            return Err(Error::InvalidTour("sequence must start at the depot (node 0)".into()));
        }
        let mut seen = vec![false; node_count];
        for &v in &nodes {
            if v >= node_count {
                return Err(Error::InvalidTour(format!(
                    "node {v} is out of range ({node_count} nodes)"
                )));
            }
            if seen[v] {
                return Err(Error::InvalidTour(format!("node {v} visited twice")));
            }
            seen[v] = true;
        }
        Ok(Self { nodes })
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// The `(tail, head)` node pairs of all arcs, closing arc last.
    pub fn arc_ends(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.nodes.len();
        (0..n).map(move |p| (self.nodes[p], self.nodes[(p + 1) % n]))
    }
}

impl std::fmt::Display for Tour {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (i, v) in self.nodes.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn builds_lookup_tables() {
        let inst = fixtures::fix_b();
        assert_eq!(inst.node_count(), 4);
        assert_eq!(inst.arcs().len(), 12);
        assert_eq!(inst.relations().len(), 1);
        assert_eq!(inst.arc_between(0, 1), Some(0));
        assert_eq!(inst.arc_between(2, 3), Some(8));
        assert_eq!(inst.arc_between(1, 1), None);
        let target = inst.arc_between(2, 3).unwrap();
        assert_eq!(inst.relations_targeting(target), &[0]);
        assert_eq!(inst.relations_triggered_by(0), &[0]);
        // Out-arcs are sorted by head, so successor scans are deterministic.
        let heads: Vec<usize> = inst.out_arcs(2).iter().map(|&k| inst.arcs()[k].head).collect();
        assert_eq!(heads, vec![0, 1, 3]);
    }

    #[test]
    fn rejects_bad_arcs() {
        let arcs = vec![Arc { tail: 0, head: 5, base_cost: 1.0 }];
        assert!(Instance::new("t", 3, arcs, vec![]).is_err());
        let arcs = vec![Arc { tail: 1, head: 1, base_cost: 1.0 }];
        assert!(Instance::new("t", 3, arcs, vec![]).is_err());
        let arcs = vec![
            Arc { tail: 0, head: 1, base_cost: 1.0 },
            Arc { tail: 0, head: 1, base_cost: 2.0 },
        ];
        assert!(Instance::new("t", 3, arcs, vec![]).is_err());
        let arcs = vec![Arc { tail: 0, head: 1, base_cost: -1.0 }];
        assert!(Instance::new("t", 3, arcs, vec![]).is_err());
    }

    #[test]
    fn rejects_bad_relations() {
        let arcs = vec![
            Arc { tail: 0, head: 1, base_cost: 1.0 },
            Arc { tail: 1, head: 0, base_cost: 1.0 },
        ];
        // Dangling arc reference.
        let rels = vec![Relation { trigger: 0, target: 7, cost: 1.0 }];
        assert!(Instance::new("t", 2, arcs.clone(), rels).is_err());
        // A relation may not trigger itself.
        let rels = vec![Relation { trigger: 1, target: 1, cost: 1.0 }];
        assert!(Instance::new("t", 2, arcs.clone(), rels).is_err());
        // Duplicate (trigger, target) pair.
        let rels = vec![
            Relation { trigger: 0, target: 1, cost: 1.0 },
            Relation { trigger: 0, target: 1, cost: 2.0 },
        ];
        assert!(Instance::new("t", 2, arcs, rels).is_err());
    }

    #[test]
    fn tour_must_be_a_depot_anchored_permutation() {
        assert!(Tour::new(4, vec![0, 1, 2, 3]).is_ok());
        assert!(Tour::new(4, vec![1, 0, 2, 3]).is_err());
        assert!(Tour::new(4, vec![0, 1, 2]).is_err());
        assert!(Tour::new(4, vec![0, 1, 2, 2]).is_err());
        assert!(Tour::new(4, vec![0, 1, 2, 9]).is_err());
    }

    #[test]
    fn validate_tour_arcs_names_the_missing_arc() {
        let arcs = vec![
            Arc { tail: 0, head: 1, base_cost: 1.0 },
            Arc { tail: 1, head: 2, base_cost: 1.0 },
        ];
        let inst = Instance::new("path3", 3, arcs, vec![]).unwrap();
        let tour = Tour::new(3, vec![0, 1, 2]).unwrap();
        match inst.validate_tour_arcs(&tour) {
            Err(Error::MissingArc { tail: 2, head: 0 }) => {}
            other => panic!("expected missing closing arc, got {other:?}"),
        }
    }
}
