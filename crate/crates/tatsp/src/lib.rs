//! Solver toolkit for the trigger arc traveling salesman problem.
//!
//! The problem extends the asymmetric TSP with trigger relations between
//! arcs: traversing a *trigger* arc re-prices a later *target* arc, and when
//! several triggers for the same target have fired, the latest one before the
//! target decides. The crate provides:
//!
//! - the instance/tour data model with exact full and incremental evaluation
//!   ([`instance`], [`eval`]),
//! - a reproducible random-instance generator and benchmark suite
//!   ([`generator`]),
//! - randomized construction heuristics over perturbed cost matrices
//!   backed by an embedded TSP sub-solver ([`construction`], [`subsolver`]),
//! - first-improvement local search over tour neighborhoods
//!   ([`localsearch`]) and the multi-start search engine that combines the
//!   two ([`grasp`]),
//! - an exact mixed-integer model with LP export and an assignment checker
//!   ([`mip`]),
//! - a definitional evaluator and exhaustive optimum search used as ground
//!   truth ([`oracle`]).
//!
//! All randomized components take explicit seeds and are deterministic for a
//! fixed seed, including under multiple worker threads.

pub mod construction;
pub mod error;
pub mod eval;
pub mod fileio;
pub mod fixtures;
pub mod generator;
pub mod grasp;
pub mod instance;
pub mod localsearch;
pub mod mip;
pub mod oracle;
pub mod seed;
pub mod subsolver;

pub use error::{Error, Result};
pub use eval::{delta_cost, evaluate_tour, gap, PartialState, TourEvaluation, COST_EPS};
pub use instance::{Arc, Instance, Relation, Tour};
