//! STRIPS subset of PDDL: parsing, type compilation and grounding.
//!
//! Types are compiled into static unary predicates, and every predicate `p`
//! gets a goal copy `p_g` of the same arity. Grounding mints the goal atoms
//! `p_g(o..)` for each goal atom `p(o..)` and adds them to the initial state.

mod ground;
mod model;
mod parse;
mod print;
pub mod sexpr;

use std::fmt;

pub use ground::{ground, Atom, AtomId, GroundAction, GroundError, GroundOptions, GroundTask, PredicateKind, PredicateSig};
pub use model::{
    ActionSchema, AtomTemplate, DomainModel, GroundAtom, InstanceModel, Literal, Predicate, PredicateOrigin, Term,
    TypeDecl, TypedName, OBJECT_TYPE,
};
pub use parse::{parse_domain, parse_instance};
pub use sexpr::Pos;

/// Requirement flags this frontend accepts.
pub const SUPPORTED_REQUIREMENTS: &[&str] = &[":strips", ":typing", ":negative-preconditions"];

/// Suffix of minted goal predicates.
pub const GOAL_SUFFIX: &str = "_g";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at {pos}: {message}")]
    Syntax { pos: Pos, message: String },
    #[error("unsupported feature at {pos}: {feature}")]
    Unsupported { pos: Pos, feature: String },
    #[error("undeclared {kind} '{name}' at {pos}")]
    Undeclared { pos: Pos, kind: &'static str, name: String },
    #[error("predicate '{predicate}' used with {found} arguments at {pos}, declared with {expected}")]
    Arity {
        pos: Pos,
        predicate: String,
        expected: usize,
        found: usize,
    },
    #[error("duplicate {kind} '{name}' at {pos}")]
    Duplicate { pos: Pos, kind: &'static str, name: String },
    #[error("invalid input at {pos}: {message}")]
    Invalid { pos: Pos, message: String },
}

impl ParseError {
    pub(crate) fn syntax(pos: Pos, message: impl fmt::Display) -> Self {
        ParseError::Syntax {
            pos,
            message: message.to_string(),
        }
    }

    pub(crate) fn invalid(pos: Pos, message: impl fmt::Display) -> Self {
        ParseError::Invalid {
            pos,
            message: message.to_string(),
        }
    }

    pub fn pos(&self) -> Pos {
        match self {
            ParseError::Syntax { pos, .. }
            | ParseError::Unsupported { pos, .. }
            | ParseError::Undeclared { pos, .. }
            | ParseError::Arity { pos, .. }
            | ParseError::Duplicate { pos, .. }
            | ParseError::Invalid { pos, .. } => *pos,
        }
    }
}

/// Parses a domain and an instance and grounds them with default options.
pub fn load_task(domain_text: &str, instance_text: &str) -> Result<GroundTask, crate::Error> {
    let domain = parse_domain(domain_text)?;
    let instance = parse_instance(instance_text, &domain)?;
    Ok(ground(&domain, &instance, &GroundOptions::default())?)
}
