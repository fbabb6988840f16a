use thiserror::Error;

use crate::Level;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed input: {0}")]
    MalformedInput(String),
    #[error("dataset is empty: no valid streamline")]
    EmptyDataset,
    #[error("invalid resampling spacing {0}")]
    InvalidSpacing(f64),
    #[error("level mismatch: expected {expected}, found {found}")]
    LevelMismatch { expected: Level, found: Level },
    #[error("invalid element id {id} at {level} level")]
    InvalidId { id: usize, level: Level },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("graph has no edges")]
    DegenerateGraph,
    #[error("selection is empty")]
    EmptySelection,
    #[error("invalid cluster count k={k} for {rows} rows")]
    InvalidK { k: usize, rows: usize },
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("node {0} is not a leaf")]
    NotALeaf(u64),
    #[error("node {0} is not internal")]
    NotInternal(u64),
    #[error("nodes are not siblings")]
    NotSiblings,
    #[error("unknown community node {0}")]
    InvalidNode(u64),
    #[error("invalid operation: {0}")]
    InvalidOperation(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}
