//! Symmetry detection for classical planning states.
//!
//! A state is turned into a vertex-colored object graph; isomorphic states
//! share a canonical form, which makes it possible to quotient a transition
//! system. Color refinement (1-WL, 2-FWL) is then checked against the exact
//! quotient to find pairs of states it cannot tell apart.

pub mod abstraction;
pub mod benchmarks;
pub mod canonical;
pub mod conflicts;
pub mod graph;
pub mod object_graph;
pub mod pddl;
pub mod state_space;
pub mod wl;

pub use graph::ColoredGraph;
pub use pddl::{load_task, GroundTask};
pub use state_space::{expand, State, TransitionSystem};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] pddl::ParseError),
    #[error(transparent)]
    Ground(#[from] pddl::GroundError),
    #[error(transparent)]
    StateCap(#[from] state_space::StateCapExceeded),
    #[error(transparent)]
    Consistency(#[from] abstraction::ConsistencyError),
    #[error(transparent)]
    TooLarge(#[from] wl::TooLarge),
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
