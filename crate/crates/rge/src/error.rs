use std::path::PathBuf;
use thiserror::Error;

/// Errors surfaced by the rge library.
#[derive(Debug, Error)]
pub enum Error {
    /// A mandatory dataset file is absent.
    #[error("format error: missing file {0}")]
    MissingFile(PathBuf),

    /// A token could not be parsed as an integer.
    #[error("parse error in {file} at line {line}: {message}")]
    Parse {
        file: String,
        line: usize,
        message: String,
    },

    /// The dataset files contradict each other (e.g. an edge crossing graphs).
    #[error("consistency error in {file} at line {line}: {message}")]
    Consistency {
        file: String,
        line: usize,
        message: String,
    },

    /// A graph or dataset invariant was violated at construction.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// An operation precondition was violated.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Two objects that must share a dimension do not.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// The transportation problem has no feasible flow.
    #[error("infeasible transport problem: {0}")]
    Infeasible(String),

    /// A numerical routine failed to reach its accuracy target.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Training labels are degenerate (fewer than two classes).
    #[error("degenerate labels: {0}")]
    DegenerateLabels(String),

    /// A class is too small to be split across the requested folds.
    #[error("stratification error: class {class} has {count} members, fewer than {folds} folds")]
    Stratification {
        class: usize,
        count: usize,
        folds: usize,
    },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
