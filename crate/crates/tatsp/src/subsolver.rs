//! Embedded solver for the relation-free TSP over a static cost matrix.
//!
//! Construction heuristics perturb the base costs and then need good tours
//! for the resulting classic (asymmetric) TSP. Small instances are solved
//! exactly with the Held-Karp dynamic program; larger ones fall back to a
//! pool of multi-start nearest-neighbor tours polished by 2-opt descent on
//! the same static costs. Tour edits here never touch trigger relations —
//! pricing pool tours under the real objective is the caller's job.

use std::time::{Duration, Instant};

use rand::Rng;

use crate::construction::CostMatrix;
use crate::error::{Error, Result};
use crate::eval::COST_EPS;
use crate::instance::{Instance, Tour};

/// Hard node-count ceiling for the exact dynamic program (2^n states).
pub const EXACT_NODE_LIMIT: usize = 16;

/// Default node count up to which the dispatcher solves exactly.
pub const DEFAULT_EXACT_DISPATCH: usize = 13;

/// Budget and shape of a sub-solver call.
///
/// When `max_starts` is set it is the only budget (wall-clock time is
/// ignored), which makes runs reproducible; otherwise the heuristic loops
/// until `time_limit` expires.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubsolverConfig {
    /// Keep up to this many distinct tours.
    pub pool_size: usize,
    /// Wall-clock budget of one heuristic-pool call.
    pub time_limit: Duration,
    /// Deterministic budget: number of multi-start iterations.
    pub max_starts: Option<u64>,
    /// Instances up to this many nodes are solved exactly (clamped to
    /// [`EXACT_NODE_LIMIT`]).
    pub exact_node_limit: usize,
}

impl Default for SubsolverConfig {
    fn default() -> Self {
        Self {
            pool_size: 10,
            time_limit: Duration::from_secs(2),
            max_starts: None,
            exact_node_limit: DEFAULT_EXACT_DISPATCH,
        }
    }
}

/// Distinct tours sorted by their static-cost value (ties by lexicographic
/// node order), truncated to a capacity.
#[derive(Debug, Clone, Default)]
pub struct TourPool {
    entries: Vec<(Tour, f64)>,
}

impl TourPool {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts a tour unless an identical one is already present, keeping the
    /// pool sorted and capped at `capacity`.
    pub fn insert(&mut self, tour: Tour, cost: f64, capacity: usize) {
        if self.entries.iter().any(|(t, _)| t == &tour) {
            return;
        }
        self.entries.push((tour, cost));
        self.entries
            .sort_by(|(ta, ca), (tb, cb)| ca.total_cmp(cb).then_with(|| ta.nodes().cmp(tb.nodes())));
        self.entries.truncate(capacity.max(1));
    }

    pub fn best(&self) -> Option<(&Tour, f64)> {
        self.entries.first().map(|(t, c)| (t, *c))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Tour, f64)> {
        self.entries.iter().map(|(t, c)| (t, *c))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Dense `n x n` lookup of the matrix costs; missing arcs are +infinity.
fn dense_costs(inst: &Instance, cm: &CostMatrix) -> Vec<f64> {
    let n = inst.node_count();
    let mut dense = vec![f64::INFINITY; n * n];
    for (k, a) in inst.arcs().iter().enumerate() {
        dense[a.tail * n + a.head] = cm.cost(k);
    }
    dense
}

fn static_tour_cost(dense: &[f64], n: usize, nodes: &[usize]) -> f64 {
    (0..nodes.len())
        .map(|p| dense[nodes[p] * n + nodes[(p + 1) % nodes.len()]])
        .sum()
}

/// Exact minimum-cost Hamiltonian cycle under the static costs (Held-Karp
/// dynamic program over node subsets). Handles negative costs; missing arcs
/// are treated as infinitely expensive. Deterministic: cost ties resolve to
/// the first candidate in ascending node order.
pub fn held_karp(inst: &Instance, cm: &CostMatrix) -> Result<Tour> {
    let n = inst.node_count();
    if n > EXACT_NODE_LIMIT {
        return Err(Error::TooLarge { what: "exact TSP solver", limit: EXACT_NODE_LIMIT, actual: n });
    }
    if n == 1 {
        return Err(Error::NoFeasibleTour);
    }
    let dense = dense_costs(inst, cm);

    // dp[mask * m + last]: cheapest path 0 -> ... -> (last+1) visiting exactly
    // the non-depot nodes in `mask` (bit k stands for node k+1).
    let m = n - 1;
    let full: usize = 1 << m;
    let mut dp = vec![f64::INFINITY; full * m];
    let mut parent = vec![u8::MAX; full * m];
    for k in 0..m {
        dp[(1 << k) * m + k] = dense[k + 1];
    }
    for mask in 1..full {
        for last in 0..m {
            if mask & (1 << last) == 0 {
                continue;
            }
            let cur = dp[mask * m + last];
            if !cur.is_finite() {
                continue;
            }
            for next in 0..m {
                if mask & (1 << next) != 0 {
                    continue;
                }
                let step = dense[(last + 1) * n + (next + 1)];
                if !step.is_finite() {
                    continue;
                }
                let slot = (mask | (1 << next)) * m + next;
                if cur + step < dp[slot] {
                    dp[slot] = cur + step;
                    parent[slot] = last as u8;
                }
            }
        }
    }

    let mut best: Option<(f64, usize)> = None;
    for last in 0..m {
        let cur = dp[(full - 1) * m + last];
        let closing = dense[(last + 1) * n];
        if cur.is_finite() && closing.is_finite() {
            let total = cur + closing;
            if best.is_none_or(|(b, _)| total < b) {
                best = Some((total, last));
            }
        }
    }
    let (_, mut last) = best.ok_or(Error::NoFeasibleTour)?;

    let mut reversed = vec![last + 1];
    let mut mask = full - 1;
    while mask.count_ones() > 1 {
        let prev = parent[mask * m + last] as usize;
        mask &= !(1 << last);
        last = prev;
        reversed.push(last + 1);
    }
    reversed.push(0);
    reversed.reverse();
    Tour::new(n, reversed)
}

/// Multi-start nearest-neighbor plus 2-opt descent under the static costs,
/// collecting up to `pool_size` distinct local optima. Returns an empty pool
/// when no start produces a feasible tour within the budget.
pub fn heuristic_pool<R: Rng>(
    inst: &Instance,
    cm: &CostMatrix,
    cfg: &SubsolverConfig,
    rng: &mut R,
) -> TourPool {
    let n = inst.node_count();
    let mut pool = TourPool::new();
    if n < 2 {
        return pool;
    }
    let dense = dense_costs(inst, cm);
    let started = Instant::now();
    let mut starts = 0u64;
    loop {
        match cfg.max_starts {
            Some(cap) => {
                if starts >= cap {
                    break;
                }
            }
            None => {
                if started.elapsed() >= cfg.time_limit {
                    break;
                }
            }
        }
        starts += 1;
        if let Some(mut nodes) = nearest_neighbor(&dense, n, rng) {
            let cost = two_opt_descent(&dense, n, &mut nodes);
            let tour = Tour::new(n, nodes).expect("construction yields a permutation");
            pool.insert(tour, cost, cfg.pool_size);
        }
    }
    pool
}

/// Solves the static TSP with the configured strategy: exact up to the
/// dispatch limit, heuristic pool beyond it. An unsolvable or fruitless call
/// yields an empty pool.
pub fn solve_pool<R: Rng>(
    inst: &Instance,
    cm: &CostMatrix,
    cfg: &SubsolverConfig,
    rng: &mut R,
) -> TourPool {
    let exact_up_to = cfg.exact_node_limit.min(EXACT_NODE_LIMIT);
    if inst.node_count() <= exact_up_to {
        let mut pool = TourPool::new();
        if let Ok(tour) = held_karp(inst, cm) {
            let cost = static_tour_cost(&dense_costs(inst, cm), inst.node_count(), tour.nodes());
            pool.insert(tour, cost, cfg.pool_size);
        }
        pool
    } else {
        heuristic_pool(inst, cm, cfg, rng)
    }
}

/// Greedy tour from the depot: a uniformly random first hop, then always the
/// cheapest unvisited successor (ties to the lowest node id). `None` on dead
/// ends or a missing closing arc.
fn nearest_neighbor<R: Rng>(dense: &[f64], n: usize, rng: &mut R) -> Option<Vec<usize>> {
    let first_hops: Vec<usize> = (1..n).filter(|&j| dense[j].is_finite()).collect();
    if first_hops.is_empty() {
        return None;
    }
    let mut nodes = vec![0, first_hops[rng.gen_range(0..first_hops.len())]];
    let mut visited = vec![false; n];
    visited[0] = true;
    visited[nodes[1]] = true;
    while nodes.len() < n {
        let last = *nodes.last().expect("path is never empty");
        let mut best: Option<(f64, usize)> = None;
        for j in 0..n {
            if !visited[j] {
                let cost = dense[last * n + j];
                if cost.is_finite() && best.is_none_or(|(b, _)| cost < b) {
                    best = Some((cost, j));
                }
            }
        }
        let (_, next) = best?;
        visited[next] = true;
        nodes.push(next);
    }
    if dense[nodes[n - 1] * n].is_finite() {
        Some(nodes)
    } else {
        None
    }
}

/// First-improvement 2-opt on the static costs, in place, until locally
/// optimal; returns the final tour cost. Because the costs may be
/// asymmetric, the delta includes the cost change of the reversed segment,
/// kept O(1) per candidate via prefix sums that are rebuilt after each
/// accepted move.
fn two_opt_descent(dense: &[f64], n: usize, nodes: &mut [usize]) -> f64 {
    if n < 4 {
        return static_tour_cost(dense, n, nodes);
    }
    loop {
        // reverse_shift[k]: cost change of flipping the first k arcs of the
        // open path; missing[k]: how many of those reversals need absent arcs.
        let mut reverse_shift = vec![0.0; n];
        let mut missing = vec![0usize; n];
        for k in 0..n - 1 {
            let forward = dense[nodes[k] * n + nodes[k + 1]];
            let backward = dense[nodes[k + 1] * n + nodes[k]];
            reverse_shift[k + 1] =
                reverse_shift[k] + if backward.is_finite() { backward - forward } else { 0.0 };
            missing[k + 1] = missing[k] + usize::from(!backward.is_finite());
        }

        let mut improved = false;
        'scan: for i in 0..=n - 3 {
            for j in i + 2..=n - 1 {
                if i == 0 && j == n - 1 {
                    continue; // these arcs are adjacent around the cycle
                }
                if missing[j] - missing[i + 1] > 0 {
                    continue;
                }
                let added = dense[nodes[i] * n + nodes[j]]
                    + dense[nodes[i + 1] * n + nodes[(j + 1) % n]];
                if !added.is_finite() {
                    continue;
                }
                let removed = dense[nodes[i] * n + nodes[i + 1]]
                    + dense[nodes[j] * n + nodes[(j + 1) % n]];
                let delta = added - removed + (reverse_shift[j] - reverse_shift[i + 1]);
                if delta < -COST_EPS {
                    nodes[i + 1..=j].reverse();
                    improved = true;
                    break 'scan;
                }
            }
        }
        if !improved {
            return static_tour_cost(dense, n, nodes);
        }
    }
}
