//! Crate-wide error type.

use std::io;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Instance or solution text that does not follow the file format.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Structurally invalid instance data (bad ids, duplicates, negative costs).
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    /// A node sequence that is not a depot-anchored permutation.
    #[error("invalid tour: {0}")]
    InvalidTour(String),

    /// A tour (or extension step) requires an arc the instance does not have.
    #[error("arc ({tail}, {head}) is not in the instance")]
    MissingArc { tail: usize, head: usize },

    /// A parameter outside its documented domain.
    #[error("{0}")]
    Domain(String),

    /// Input too large for an operation with an explicit size guard.
    #[error("{what} supports at most {limit} nodes ({actual} given)")]
    TooLarge {
        what: &'static str,
        limit: usize,
        actual: usize,
    },

    /// The requested model would exceed the configured constraint cap.
    #[error("model would have {constraints} constraints, more than the cap of {cap}")]
    ModelTooLarge { constraints: usize, cap: usize },

    /// Exhaustive search proved that no feasible tour exists.
    #[error("no feasible tour exists")]
    NoFeasibleTour,

    /// Every construction attempt of a search run failed.
    #[error("no solution found ({construction_failures} constructions failed)")]
    NoSolution { construction_failures: u64 },

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
