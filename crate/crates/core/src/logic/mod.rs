//! Monadic second-order logic over nested words: formula syntax, a direct
//! evaluator, sphere-count constraints with their counting acceptor, and the
//! alphabet expansion/projection used for existential set quantifiers.

use thiserror::Error;

use crate::automata::AutomatonError;
use crate::spheres::SphereError;

pub mod eval;
pub mod expand;
pub mod formula;
pub mod hanf;

pub use eval::{eval, eval_with_limit, Assignment, Compiled, Structure, DEFAULT_SO_LIMIT};
pub use expand::{expand_alphabet, project};
pub use formula::{Formula, Relation};
pub use hanf::{compile_constraint, direct_count_verdict, ConstraintExpr, CountingAcceptor, SphereConstraint, SphereRef};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LogicError {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("variable `{0}` is not bound")]
    UnboundVariable(String),
    #[error("value of `{0}` is outside the structure")]
    ValueOutOfRange(String),
    #[error("set quantifiers over {size} elements exceed the limit of {limit}")]
    WordTooLargeForSO { size: usize, limit: usize },
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("relation `{0}` is not available on this structure")]
    UnsupportedRelation(String),
    #[error("constraint mixes radius {expected} with radius {found}")]
    MixedRadius { expected: usize, found: usize },
    #[error("not an expanded alphabet: {0}")]
    NotAnExpandedAlphabet(String),
    #[error(transparent)]
    Sphere(#[from] SphereError),
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
    #[error("invalid constraint file: {0}")]
    Json(String),
}
