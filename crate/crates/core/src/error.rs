use crate::grid::TileCoord;
use thiserror::Error;

/// Failure to turn a fact file into a [`WallProblem`](crate::WallProblem).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProblemError {
    #[error("line {line}: syntax error: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: unknown building type `{name}`")]
    UnknownType { line: usize, name: String },
    #[error("line {line}: duplicate declaration: {what}")]
    Duplicate { line: usize, what: String },
    #[error("line {line}: invalid value: {msg}")]
    InvalidValue { line: usize, msg: String },
    #[error("incomplete declaration: {0}")]
    Incomplete(String),
    #[error("missing {0} fact")]
    MissingAnchor(&'static str),
}

/// Two instances claim the same walkable tile.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{} overlapping tile(s), first at {} ({} / {})", .conflicts.len(), .conflicts[0].0, .conflicts[0].1, .conflicts[0].2)]
pub struct OverlapError {
    /// `(tile, first instance, second instance)` in tile order.
    pub conflicts: Vec<(TileCoord, String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("assignment names unknown instance `{0}`")]
    UnknownInstance(String),
    #[error("assignment does not place instance `{0}`")]
    Unplaced(String),
    #[error("invalid stages: {0}")]
    Stage(String),
    #[error("oracle enumeration too large: {product} assignments exceed the bound of {bound}")]
    TooLarge { product: u128, bound: u128 },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {msg}")]
pub struct AnswerError {
    pub line: usize,
    pub msg: String,
}
