//! Multi-start search: randomized construction plus descent, iterated.
//!
//! Each iteration draws its own generator seeded from the run seed and the
//! iteration number, builds a tour with the configured construction
//! heuristic, polishes it with first-improvement descent and challenges the
//! incumbent. Iterations are independent, so they can be claimed by several
//! worker threads from a shared counter; results merge by cost with ties to
//! the earlier iteration, which makes the outcome identical for any worker
//! count under an iteration cap.

use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::construction::ConstructionHeuristic;
use crate::error::{Error, Result};
use crate::instance::{Instance, Tour};
use crate::localsearch::{descent, MoveKind};
use crate::seed::mix_seed;
use crate::subsolver::SubsolverConfig;

/// Everything a search run needs: strategy, limits, seed and parallelism.
#[derive(Debug, Clone)]
pub struct GraspConfig {
    /// Construction heuristic run at every iteration.
    pub construction: ConstructionHeuristic,
    /// Descent neighborhoods, scanned in this order.
    pub neighborhoods: Vec<MoveKind>,
    /// Wall-clock budget. Iteration 0 always runs even if it is exceeded.
    pub time_limit: Option<Duration>,
    /// Budget for the static sub-solver inside the perturbation heuristics.
    pub subsolver: SubsolverConfig,
    /// Hard cap on iterations; `None` leaves the time limit in charge.
    pub max_iterations: Option<u64>,
    /// Run seed; iteration `i` uses the generator seeded with
    /// `mix_seed(seed, i)`.
    pub seed: u64,
    /// Worker threads claiming iterations from a shared counter.
    pub workers: usize,
}

impl Default for GraspConfig {
    fn default() -> Self {
        GraspConfig {
            construction: ConstructionHeuristic::default(),
            neighborhoods: MoveKind::ALL.to_vec(),
            time_limit: Some(Duration::from_secs(60)),
            subsolver: SubsolverConfig::default(),
            max_iterations: None,
            seed: 0,
            workers: 1,
        }
    }
}

impl GraspConfig {
    /// The long-run preset: three hours of wall clock with a five-second
    /// budget per sub-solver call.
    pub fn competition() -> Self {
        GraspConfig {
            time_limit: Some(Duration::from_secs(3 * 3600)),
            subsolver: SubsolverConfig {
                time_limit: Duration::from_secs(5),
                ..SubsolverConfig::default()
            },
            ..GraspConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.construction.validate()?;
        if self.neighborhoods.is_empty() {
            return Err(Error::Domain("at least one descent neighborhood is required".into()));
        }
        if self.time_limit.is_none() && self.max_iterations.is_none() {
            return Err(Error::Domain(
                "set a time limit or an iteration cap, otherwise the search never stops".into(),
            ));
        }
        if self.workers == 0 {
            return Err(Error::Domain("worker count must be at least 1".into()));
        }
        Ok(())
    }
}

/// Outcome of a search run.
#[derive(Debug, Clone)]
pub struct GraspResult {
    /// Best tour found across all iterations.
    pub tour: Tour,
    /// Its exact objective value.
    pub cost: f64,
    /// Iteration that produced it.
    pub best_iteration: u64,
    /// Iterations actually executed.
    pub iterations: u64,
    /// Construction attempts that produced no tour.
    pub construction_failures: u64,
}

struct WorkerOutcome {
    best: Option<(f64, u64, Tour)>,
    executed: u64,
    failures: u64,
}

fn better(candidate: &(f64, u64, Tour), incumbent: &(f64, u64, Tour)) -> bool {
    candidate
        .0
        .total_cmp(&incumbent.0)
        .then_with(|| candidate.1.cmp(&incumbent.1))
        .is_lt()
}

fn run_worker(
    inst: &Instance,
    cfg: &GraspConfig,
    counter: &AtomicU64,
    start: Instant,
) -> WorkerOutcome {
    let mut out = WorkerOutcome { best: None, executed: 0, failures: 0 };
    loop {
        let iteration = counter.fetch_add(1, Ordering::SeqCst);
        if let Some(cap) = cfg.max_iterations {
            if iteration >= cap {
                break;
            }
        }
        if iteration > 0 {
            if let Some(limit) = cfg.time_limit {
                if start.elapsed() >= limit {
                    break;
                }
            }
        }
        out.executed += 1;
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(cfg.seed, iteration));
        let constructed = match cfg.construction.construct(inst, &cfg.subsolver, &mut rng) {
            Ok(c) => c,
            Err(_) => {
                out.failures += 1;
                continue;
            }
        };
        let (tour, cost) = descent(inst, &constructed.tour, &cfg.neighborhoods)
            .expect("constructed tours only use existing arcs");
        let candidate = (cost, iteration, tour);
        if out.best.as_ref().is_none_or(|b| better(&candidate, b)) {
            out.best = Some(candidate);
        }
    }
    out
}

/// Runs the search until a limit is hit and returns the best tour found.
///
/// Fails with [`Error::NoSolution`] when every construction attempt failed,
/// which on very sparse graphs is a real possibility.
pub fn run(inst: &Instance, cfg: &GraspConfig) -> Result<GraspResult> {
    cfg.validate()?;
    let start = Instant::now();
    let counter = AtomicU64::new(0);

    let outcomes: Vec<WorkerOutcome> = if cfg.workers == 1 {
        vec![run_worker(inst, cfg, &counter, start)]
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..cfg.workers)
                .map(|_| scope.spawn(|| run_worker(inst, cfg, &counter, start)))
                .collect();
            handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
        })
    };

    let mut best: Option<(f64, u64, Tour)> = None;
    let mut iterations = 0;
    let mut construction_failures = 0;
    for out in outcomes {
        iterations += out.executed;
        construction_failures += out.failures;
        if let Some(candidate) = out.best {
            if best.as_ref().is_none_or(|b| better(&candidate, b)) {
                best = Some(candidate);
            }
        }
    }

    match best {
        Some((cost, best_iteration, tour)) => Ok(GraspResult {
            tour,
            cost,
            best_iteration,
            iterations,
            construction_failures,
        }),
        None => Err(Error::NoSolution { construction_failures }),
    }
}
