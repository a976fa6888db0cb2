//! Canonical forms of colored graphs and state isomorphism.

mod brute;
mod cache;
mod partition;
mod search;

pub use brute::{brute_force_isomorphic, graphs_isomorphic, BoundExceeded, DEFAULT_STRUCTURE_BOUND};
pub use cache::FormCache;
pub use partition::{refine, OrderedPartition};
pub use search::{canonical_form, canonical_labeling, CanonicalForm, SearchStats};

use crate::object_graph::{build_object_graph, ColorLegend, Encoding};
use crate::pddl::GroundTask;
use crate::state_space::State;

/// Canonical form of a state's plain object graph.
pub fn state_form(s: &State, task: &GroundTask, legend: &ColorLegend) -> CanonicalForm {
    canonical_form(&build_object_graph(s, task, Encoding::Plain, legend).graph)
}

/// Decides isomorphism of two states, possibly from different instances of
/// one domain. Different object counts are never isomorphic.
pub fn states_isomorphic(s: &State, s_task: &GroundTask, t: &State, t_task: &GroundTask) -> bool {
    if s_task.objects.len() != t_task.objects.len() {
        return false;
    }
    let legend = ColorLegend::for_task(s_task);
    if !legend.is_compatible(t_task) {
        return false;
    }
    state_form(s, s_task, &legend) == state_form(t, t_task, &legend)
}
