use thiserror::Error;

use crate::analysis::KViolation;
use crate::poset::{NodeId, Violation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid cardinality literal {0:?} (expected finite:<n>, aleph0 or beta)")]
pub struct ParseCardError(pub String);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PosetError {
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("bound query on an empty node set")]
    EmptySet,
    #[error("invalid poset: {}", first_violation(.0))]
    Invalid(Vec<Violation>),
}

fn first_violation(v: &[Violation]) -> String {
    match v.first() {
        Some(first) if v.len() > 1 => format!("{first} (and {} more)", v.len() - 1),
        Some(first) => first.to_string(),
        None => "no violations recorded".to_owned(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error("not a K-poset: {}", .0.first().map(ToString::to_string).unwrap_or_default())]
    NotK(Vec<KViolation>),
    #[error("not a proper K-poset: {}", .0.first().map(ToString::to_string).unwrap_or_default())]
    NotProper(Vec<KViolation>),
    #[error("expected exactly one maximal node, found {0}")]
    NotSingleMax(String),
    #[error("node {0} is not maximal")]
    NotMaximal(NodeId),
    #[error("node {0} has height zero")]
    HeightZero(NodeId),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MapError {
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error("node {0} has no image")]
    Unmapped(NodeId),
    #[error("class flows do not balance: {0}")]
    Unbalanced(String),
    #[error("map is not monotone: {0}")]
    NotMonotone(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransformError {
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error("fiber is empty")]
    EmptyFiber,
    #[error("fiber node {0} is not maximal")]
    FiberNotMaximal(NodeId),
    #[error("fiber node {0} has height zero")]
    FiberHeightZero(NodeId),
    #[error("down-set condition fails at {node}: {below} lies below its image but outside the image of the map")]
    DownSet { node: NodeId, below: String },
    #[error("class {0} is only partly covered by the image")]
    PartialClassImage(String),
    #[error("label {0} occurs in both the source and the uncovered part of the target")]
    LabelCollision(NodeId),
    #[error("result cannot be represented as a skeleton: {0}")]
    Unrepresentable(String),
    #[error("certificate does not verify: {0}")]
    Unverified(String),
    #[error("class {class} must have infinite cardinality to absorb refinement, found {card}")]
    FiniteTarget { class: String, card: crate::CardTag },
}

#[derive(Debug, Error)]
pub enum DocumentError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("poset has no nodes")]
    Empty,
    #[error("duplicate node label {0}")]
    DuplicateLabel(String),
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error(transparent)]
    Map(#[from] MapError),
}

impl From<serde_json::Error> for DocumentError {
    fn from(e: serde_json::Error) -> Self {
        DocumentError::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}
