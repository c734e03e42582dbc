//! Neighborhood moves and first-improvement descent.
//!
//! Three classical tour neighborhoods — segment reversal, node exchange and
//! node relocation — are enumerated lexicographically. Because relation
//! activations can change anywhere in the tour when any arc moves, each
//! candidate is priced by a full re-evaluation rather than a local delta
//! formula. The descent accepts the first strictly improving move and
//! restarts from the first neighborhood, stopping at a tour none of the
//! enumerated moves improves.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::eval::{evaluate_tour, COST_EPS};
use crate::instance::{Instance, Tour};

/// The move families the descent can draw from, in their default order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MoveKind {
    /// Reverse the segment between two tour positions.
    TwoOpt,
    /// Exchange the nodes at two positions.
    Swap,
    /// Remove a node and reinsert it after another position.
    Relocate,
}

impl MoveKind {
    pub const ALL: [MoveKind; 3] = [MoveKind::TwoOpt, MoveKind::Swap, MoveKind::Relocate];

    pub fn label(&self) -> &'static str {
        match self {
            MoveKind::TwoOpt => "twoopt",
            MoveKind::Swap => "swap",
            MoveKind::Relocate => "relocate",
        }
    }
}

impl fmt::Display for MoveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for MoveKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "twoopt" => Ok(MoveKind::TwoOpt),
            "swap" => Ok(MoveKind::Swap),
            "relocate" => Ok(MoveKind::Relocate),
            other => Err(Error::Domain(format!(
                "unknown neighborhood {other:?} (expected twoopt, swap or relocate)"
            ))),
        }
    }
}

/// One concrete move: a kind plus its two position indices.
///
/// Positions refer to the current tour order, with the depot at position 0.
/// The exact meaning of `(i, j)` depends on the kind; see [`apply_move`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Move {
    pub kind: MoveKind,
    pub i: usize,
    pub j: usize,
}

/// All moves of one kind on a tour of `n` nodes, in lexicographic `(i, j)`
/// order.
///
/// Neighborhood sizes: reversal has `n(n-3)/2` moves (index pairs at least
/// two apart, minus the full-tour reversal), exchange `(n-1)(n-2)/2` (the
/// depot never moves), relocation `(n-1)(n-2)` (each non-depot node, every
/// distinct reinsertion point).
pub fn enumerate_moves(kind: MoveKind, n: usize) -> Vec<Move> {
    let mut moves = Vec::new();
    match kind {
        MoveKind::TwoOpt => {
            for i in 0..n {
                for j in (i + 2)..n {
                    if i == 0 && j == n - 1 {
                        continue; // both cut arcs touch the depot: full reversal
                    }
                    moves.push(Move { kind, i, j });
                }
            }
        }
        MoveKind::Swap => {
            for i in 1..n {
                for j in (i + 1)..n {
                    moves.push(Move { kind, i, j });
                }
            }
        }
        MoveKind::Relocate => {
            for i in 1..n {
                for j in 0..n {
                    if j == i || j + 1 == i {
                        continue; // reinserting where it came from
                    }
                    moves.push(Move { kind, i, j });
                }
            }
        }
    }
    moves
}

/// Applies a move to a tour, returning the new tour.
///
/// - `TwoOpt { i, j }`: reverse positions `i+1 ..= j` (requires
///   `i + 2 <= j < n`, not the full-tour pair `(0, n-1)`).
/// - `Swap { i, j }`: exchange positions `i` and `j` (requires
///   `1 <= i < j < n`).
/// - `Relocate { i, j }`: remove the node at position `i` and reinsert it
///   immediately after the node originally at position `j` (requires
///   `1 <= i < n`, `j < n`, `j != i`, `j + 1 != i`).
pub fn apply_move(tour: &Tour, mv: Move) -> Tour {
    let n = tour.len();
    let mut nodes = tour.nodes().to_vec();
    match mv.kind {
        MoveKind::TwoOpt => {
            assert!(mv.i + 2 <= mv.j && mv.j < n, "reversal indices out of range: {mv:?}");
            assert!(!(mv.i == 0 && mv.j == n - 1), "full-tour reversal is not enumerated: {mv:?}");
            nodes[mv.i + 1..=mv.j].reverse();
        }
        MoveKind::Swap => {
            assert!(1 <= mv.i && mv.i < mv.j && mv.j < n, "exchange indices out of range: {mv:?}");
            nodes.swap(mv.i, mv.j);
        }
        MoveKind::Relocate => {
            assert!(
                (1..n).contains(&mv.i) && mv.j < n && mv.j != mv.i && mv.j + 1 != mv.i,
                "relocation indices out of range: {mv:?}"
            );
            let node = nodes.remove(mv.i);
            let after = if mv.j > mv.i { mv.j - 1 } else { mv.j };
            nodes.insert(after + 1, node);
        }
    }
    Tour::new(n, nodes).expect("moves preserve the depot-anchored permutation")
}

/// Prices a move by fully re-evaluating the moved tour. Returns the new
/// total cost, or `None` if the move routes over an arc the instance does
/// not have.
pub fn evaluate_move(inst: &Instance, tour: &Tour, mv: Move) -> Option<f64> {
    let moved = apply_move(tour, mv);
    evaluate_tour(inst, &moved).ok().map(|ev| ev.total_cost)
}

/// First-improvement descent over the given neighborhoods, in order.
///
/// Accepts the first move that improves the objective by more than the
/// numeric threshold and restarts scanning from the first neighborhood.
/// Returns the final tour and its cost once no enumerated move improves;
/// the result is deterministic in the start tour and neighborhood order.
pub fn descent(inst: &Instance, start: &Tour, kinds: &[MoveKind]) -> Result<(Tour, f64)> {
    let mut current = start.clone();
    let mut current_cost = evaluate_tour(inst, &current)?.total_cost;
    let n = current.len();
    'outer: loop {
        for &kind in kinds {
            for mv in enumerate_moves(kind, n) {
                if let Some(cost) = evaluate_move(inst, &current, mv) {
                    if cost - current_cost < -COST_EPS {
                        current = apply_move(&current, mv);
                        current_cost = cost;
                        continue 'outer;
                    }
                }
            }
        }
        return Ok((current, current_cost));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::generator::{generate_rg, RgSpec, Scenario};
    use proptest::prelude::*;

    #[test]
    fn neighborhood_sizes_match_the_closed_forms() {
        for n in 4..=9usize {
            assert_eq!(enumerate_moves(MoveKind::TwoOpt, n).len(), n * (n - 3) / 2, "twoopt n={n}");
            assert_eq!(
                enumerate_moves(MoveKind::Swap, n).len(),
                (n - 1) * (n - 2) / 2,
                "swap n={n}"
            );
            assert_eq!(
                enumerate_moves(MoveKind::Relocate, n).len(),
                (n - 1) * (n - 2),
                "relocate n={n}"
            );
        }
        // n = 4 spot check: 2, 3 and 6 moves.
        assert_eq!(enumerate_moves(MoveKind::TwoOpt, 4).len(), 2);
        assert_eq!(enumerate_moves(MoveKind::Swap, 4).len(), 3);
        assert_eq!(enumerate_moves(MoveKind::Relocate, 4).len(), 6);
    }

    #[test]
    fn enumeration_is_lexicographic() {
        let moves = enumerate_moves(MoveKind::TwoOpt, 5);
        let pairs: Vec<(usize, usize)> = moves.iter().map(|m| (m.i, m.j)).collect();
        assert_eq!(pairs, vec![(0, 2), (0, 3), (1, 3), (1, 4), (2, 4)]);
        let mut sorted = pairs.clone();
        sorted.sort();
        assert_eq!(pairs, sorted);
    }

    #[test]
    fn moves_rearrange_as_documented() {
        let tour = Tour::new(5, vec![0, 1, 2, 3, 4]).unwrap();
        let rev = apply_move(&tour, Move { kind: MoveKind::TwoOpt, i: 1, j: 3 });
        assert_eq!(rev.nodes(), &[0, 1, 3, 2, 4]);
        let swp = apply_move(&tour, Move { kind: MoveKind::Swap, i: 1, j: 3 });
        assert_eq!(swp.nodes(), &[0, 3, 2, 1, 4]);
        let fwd = apply_move(&tour, Move { kind: MoveKind::Relocate, i: 1, j: 3 });
        assert_eq!(fwd.nodes(), &[0, 2, 3, 1, 4]);
        let back = apply_move(&tour, Move { kind: MoveKind::Relocate, i: 3, j: 0 });
        assert_eq!(back.nodes(), &[0, 3, 1, 2, 4]);
    }

    #[test]
    fn relocation_repairs_the_expensive_tour() {
        // [0,2,3,1] pays the full price of arc (2,3); moving node 1 back
        // to the front restores the triggered discount for a gain of 4.
        let inst = fixtures::fix_b();
        let tour = Tour::new(4, vec![0, 2, 3, 1]).unwrap();
        let mv = Move { kind: MoveKind::Relocate, i: 3, j: 0 };
        let moved = apply_move(&tour, mv);
        assert_eq!(moved.nodes(), &[0, 1, 2, 3]);
        assert_eq!(evaluate_move(&inst, &tour, mv), Some(4.0));

        // Descent reaches the same optimum value (the first accepted move
        // is a reversal to [0,3,2,1], which dodges the expensive arc and
        // ties the triggered tour at 4).
        let (best, cost) = descent(&inst, &tour, &MoveKind::ALL).unwrap();
        assert_eq!(cost, 4.0);
        assert_eq!(evaluate_tour(&inst, &best).unwrap().total_cost, 4.0);
    }

    #[test]
    fn missing_arcs_price_as_none() {
        // A directed 4-ring plus one chord: most rearrangements leave the
        // ring and hit missing arcs.
        use crate::instance::Arc;
        let arcs = vec![
            Arc { tail: 0, head: 1, base_cost: 1.0 },
            Arc { tail: 1, head: 2, base_cost: 1.0 },
            Arc { tail: 2, head: 3, base_cost: 1.0 },
            Arc { tail: 3, head: 0, base_cost: 1.0 },
            Arc { tail: 1, head: 3, base_cost: 1.0 },
        ];
        let inst = Instance::new("ring4", 4, arcs, vec![]).unwrap();
        let tour = Tour::new(4, vec![0, 1, 2, 3]).unwrap();
        let mv = Move { kind: MoveKind::Swap, i: 1, j: 2 }; // needs arc (0,2)
        assert_eq!(evaluate_move(&inst, &tour, mv), None);
        // Descent still terminates, reporting the only feasible tour.
        let (best, cost) = descent(&inst, &tour, &MoveKind::ALL).unwrap();
        assert_eq!(best.nodes(), &[0, 1, 2, 3]);
        assert_eq!(cost, 4.0);
    }

    #[test]
    fn reversal_delta_matches_the_classical_formula_without_relations() {
        // On a symmetric instance with no relations the full re-evaluation
        // must agree with the textbook two-arc exchange delta.
        let spec = RgSpec { scenario: Scenario::Balanced, n: 8, relation_count: 0, seed: 77 };
        let inst = generate_rg(&spec).unwrap();
        let tour = Tour::new(8, vec![0, 3, 1, 6, 2, 7, 4, 5]).unwrap();
        let base = evaluate_tour(&inst, &tour).unwrap().total_cost;
        let nodes = tour.nodes();
        let n = nodes.len();
        let cost = |t: usize, h: usize| {
            inst.arcs()[inst.arc_between(t, h).unwrap()].base_cost
        };
        for mv in enumerate_moves(MoveKind::TwoOpt, n) {
            let (a, b) = (nodes[mv.i], nodes[mv.i + 1]);
            let (c, d) = (nodes[mv.j], nodes[(mv.j + 1) % n]);
            let classical = cost(a, c) + cost(b, d) - cost(a, b) - cost(c, d);
            let full = evaluate_move(&inst, &tour, mv).unwrap() - base;
            assert!((full - classical).abs() <= 1e-6, "{mv:?}: {full} vs {classical}");
        }
    }

    #[test]
    fn descent_reaches_a_local_optimum() {
        for seed in 0..10 {
            let inst = fixtures::random_instance(seed, 8, 20);
            let start = fixtures::random_tour(seed, 8);
            let (best, cost) = descent(&inst, &start, &MoveKind::ALL).unwrap();
            assert!(cost <= evaluate_tour(&inst, &start).unwrap().total_cost + COST_EPS);
            // Certificate: no enumerated move improves the final tour.
            for kind in MoveKind::ALL {
                for mv in enumerate_moves(kind, best.len()) {
                    if let Some(c) = evaluate_move(&inst, &best, mv) {
                        assert!(c - cost >= -COST_EPS, "seed {seed}: {mv:?} improves");
                    }
                }
            }
            // Re-running from the optimum is a fixed point.
            let (again, cost2) = descent(&inst, &best, &MoveKind::ALL).unwrap();
            assert_eq!(again.nodes(), best.nodes());
            assert_eq!(cost2, cost);
        }
    }

    #[test]
    fn neighborhood_names_round_trip() {
        for kind in MoveKind::ALL {
            assert_eq!(kind.label().parse::<MoveKind>().unwrap(), kind);
        }
        assert!("3opt".parse::<MoveKind>().is_err());
    }

    proptest! {
        #[test]
        fn moves_preserve_the_depot_anchored_permutation(
            seed in 0u64..500,
            n in 4usize..10,
            pick in 0usize..1000,
        ) {
            let tour = fixtures::random_tour(seed, n);
            let mut all = Vec::new();
            for kind in MoveKind::ALL {
                all.extend(enumerate_moves(kind, n));
            }
            let mv = all[pick % all.len()];
            let moved = apply_move(&tour, mv);
            prop_assert_eq!(moved.nodes()[0], 0);
            prop_assert_eq!(moved.len(), n);
            let mut sorted = moved.nodes().to_vec();
            sorted.sort_unstable();
            let want: Vec<usize> = (0..n).collect();
            prop_assert_eq!(sorted, want);
        }
    }
}
