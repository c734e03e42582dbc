//! Hand-checkable fixtures and small random generators shared by the tests.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::instance::{Arc, Instance, Relation, Tour};

/// All arcs of a complete digraph on `n` nodes with one shared base cost,
/// ordered lexicographically by (tail, head).
pub fn complete_digraph_arcs(n: usize, base_cost: f64) -> Vec<Arc> {
    let mut arcs = Vec::with_capacity(n * (n - 1));
    for tail in 0..n {
        for head in 0..n {
            if tail != head {
                arcs.push(Arc { tail, head, base_cost });
            }
        }
    }
    arcs
}

/// Complete 3-node digraph, every arc costs 1, no relations.
pub fn fix_a() -> Instance {
    Instance::new("fix_a", 3, complete_digraph_arcs(3, 1.0), vec![]).unwrap()
}

/// Complete 4-node digraph, arc (2,3) costs 5 and everything else 1; one
/// relation lets the trigger (0,1) drop (2,3) back to cost 1.
///
/// Arc ids follow the lexicographic order of `complete_digraph_arcs`, so
/// (0,1) is arc 0 and (2,3) is arc 8.
pub fn fix_b() -> Instance {
    let mut arcs = complete_digraph_arcs(4, 1.0);
    arcs[8].base_cost = 5.0;
    let relations = vec![Relation { trigger: 0, target: 8, cost: 1.0 }];
    Instance::new("fix_b", 4, arcs, relations).unwrap()
}

/// `fix_b` plus a second, later trigger (1,2) that sets (2,3) to cost 4.
pub fn fix_c() -> Instance {
    let mut arcs = complete_digraph_arcs(4, 1.0);
    arcs[8].base_cost = 5.0;
    let relations = vec![
        Relation { trigger: 0, target: 8, cost: 1.0 },
        Relation { trigger: 4, target: 8, cost: 4.0 }, // arc 4 is (1,2)
    ];
    Instance::new("fix_c", 4, arcs, relations).unwrap()
}

/// A seeded random instance: complete digraph on `n` nodes with costs in
/// [0.5, 10), plus `k` distinct relations with replacement costs in [0.1, 12)
/// (so relations can both raise and lower arc costs).
pub fn random_instance(seed: u64, n: usize, k: usize) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut arcs = complete_digraph_arcs(n, 0.0);
    for arc in &mut arcs {
        arc.base_cost = rng.gen_range(0.5..10.0);
    }
    let m = arcs.len();
    let capacity = m * (m - 1);
    let k = k.min(capacity);
    let mut pairs = std::collections::HashSet::with_capacity(k);
    let mut relations = Vec::with_capacity(k);
    while relations.len() < k {
        let trigger = rng.gen_range(0..m);
        let target = rng.gen_range(0..m);
        if trigger != target && pairs.insert((trigger, target)) {
            relations.push(Relation { trigger, target, cost: rng.gen_range(0.1..12.0) });
        }
    }
    Instance::new(format!("random_{seed}_{n}_{k}"), n, arcs, relations).unwrap()
}

/// A seeded random depot-anchored tour over `n` nodes.
pub fn random_tour(seed: u64, n: usize) -> Tour {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rest: Vec<usize> = (1..n).collect();
    rest.shuffle(&mut rng);
    let mut nodes = vec![0];
    nodes.extend(rest);
    Tour::new(n, nodes).unwrap()
}
