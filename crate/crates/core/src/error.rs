use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the library. A pipeline stage that falls short of its
/// target raises [`Error::Stage`]; `canonize` turns that into a trace record.
#[derive(Debug, Error)]
pub enum Error {
    #[error("elements must be strictly increasing naturals >= 1, got {0:?}")]
    NotASortedSubset(Vec<u32>),

    #[error("expected a {expected}-subset, got {got} elements")]
    WrongArity { expected: usize, got: usize },

    #[error("tuple {tuple:?} is not inside the domain [1, {domain}]")]
    OutsideDomain { tuple: Vec<u32>, domain: u32 },

    #[error("subset has {got} elements but at least {need} are required")]
    SubsetTooSmall { got: usize, need: usize },

    #[error("pattern {pattern:#b} does not fit arity {arity}")]
    PatternOutOfRange { pattern: u32, arity: usize },

    #[error("{what}: {count} candidates exceed the budget of {budget}")]
    BudgetExceeded {
        what: &'static str,
        count: String,
        budget: u64,
    },

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("incomplete coloring: {missing} of {expected} tuples are missing (first missing {first:?})")]
    IncompleteColoring {
        missing: u64,
        expected: u64,
        first: Vec<u32>,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{0}")]
    Stage(crate::pipeline::StageFailure),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
