//! Isomorphism quotients of transition systems.
//!
//! States are grouped by the canonical form of their plain object graph.
//! Classes may be pooled across instances of one domain; isomorphic states
//! of different instances fall into one class.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write;

use rayon::prelude::*;

use crate::canonical::{canonical_form, CanonicalForm};
use crate::object_graph::{build_object_graph, ColorLegend, Encoding};
use crate::pddl::GroundTask;
use crate::state_space::{format_vstar, TransitionSystem};

/// A state of one instance in a pooled collection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub struct StateRef {
    pub instance: usize,
    pub state: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalenceClass {
    pub id: u32,
    pub form: CanonicalForm,
    /// Lowest `(instance, state)` member.
    pub representative: StateRef,
    pub members: usize,
    pub vstar: Option<u32>,
    pub is_goal: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Abstraction {
    /// Ordered by representative.
    pub classes: Vec<EquivalenceClass>,
    /// Class id per instance and state.
    pub class_of: Vec<Vec<u32>>,
    pub initial_classes: Vec<u32>,
    /// Sorted, deduplicated class pairs.
    pub abstract_succ: Vec<(u32, u32)>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConsistencyError {
    #[error("class {class} mixes goal and non-goal states ({a:?} vs {b:?})")]
    Goal { class: u32, a: StateRef, b: StateRef },
    #[error("class {class} mixes optimal costs {va} ({a:?}) and {vb} ({b:?})")]
    Vstar {
        class: u32,
        a: StateRef,
        va: String,
        b: StateRef,
        vb: String,
    },
    #[error("instance {instance} has a different predicate table than instance 0")]
    IncompatibleDomain { instance: usize },
}

/// Canonical forms of every state, computed in parallel.
pub fn state_forms(task: &GroundTask, ts: &TransitionSystem, legend: &ColorLegend) -> Vec<CanonicalForm> {
    ts.states
        .par_iter()
        .map(|s| canonical_form(&build_object_graph(s, task, Encoding::Plain, legend).graph))
        .collect()
}

/// Quotient of a single transition system.
pub fn quotient(ts: &TransitionSystem, task: &GroundTask) -> Result<Abstraction, ConsistencyError> {
    pool(&[(task, ts)])
}

/// Pooled quotient over several instances of one domain.
pub fn pool(instances: &[(&GroundTask, &TransitionSystem)]) -> Result<Abstraction, ConsistencyError> {
    let Some(&(first, _)) = instances.first() else {
        return Ok(Abstraction {
            classes: Vec::new(),
            class_of: Vec::new(),
            initial_classes: Vec::new(),
            abstract_succ: Vec::new(),
        });
    };
    let legend = ColorLegend::for_task(first);
    for (i, (task, _)) in instances.iter().enumerate() {
        if !legend.is_compatible(task) {
            return Err(ConsistencyError::IncompatibleDomain { instance: i });
        }
    }
    let forms: Vec<Vec<CanonicalForm>> = instances
        .iter()
        .map(|(task, ts)| state_forms(task, ts, &legend))
        .collect();

    let mut classes: Vec<EquivalenceClass> = Vec::new();
    let mut by_digest: HashMap<[u8; 16], Vec<u32>> = HashMap::new();
    let mut class_of = Vec::with_capacity(instances.len());
    for (inst, ((_, ts), forms)) in instances.iter().zip(forms).enumerate() {
        let mut local = Vec::with_capacity(forms.len());
        for (state, form) in forms.into_iter().enumerate() {
            let here = StateRef { instance: inst, state };
            let bucket = by_digest.entry(form.digest()).or_default();
            let found = bucket.iter().copied().find(|&c| classes[c as usize].form.bytes() == form.bytes());
            let id = match found {
                Some(c) => {
                    let class = &mut classes[c as usize];
                    class.members += 1;
                    if class.is_goal != ts.goal_flags[state] {
                        return Err(ConsistencyError::Goal {
                            class: c,
                            a: class.representative,
                            b: here,
                        });
                    }
                    if class.vstar != ts.vstar[state] {
                        return Err(ConsistencyError::Vstar {
                            class: c,
                            a: class.representative,
                            va: format_vstar(class.vstar),
                            b: here,
                            vb: format_vstar(ts.vstar[state]),
                        });
                    }
                    c
                }
                None => {
                    let c = classes.len() as u32;
                    bucket.push(c);
                    classes.push(EquivalenceClass {
                        id: c,
                        form,
                        representative: here,
                        members: 1,
                        vstar: ts.vstar[state],
                        is_goal: ts.goal_flags[state],
                    });
                    c
                }
            };
            local.push(id);
        }
        class_of.push(local);
    }

    let mut succ = BTreeSet::new();
    for ((_, ts), local) in instances.iter().zip(&class_of) {
        for (i, j) in ts.transitions() {
            succ.insert((local[i], local[j]));
        }
    }
    Ok(Abstraction {
        initial_classes: instances
            .iter()
            .zip(&class_of)
            .map(|((_, ts), local)| local[ts.initial])
            .collect(),
        classes,
        class_of,
        abstract_succ: succ.into_iter().collect(),
    })
}

impl Abstraction {
    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn num_states(&self) -> usize {
        self.class_of.iter().map(Vec::len).sum()
    }

    /// `|states| / |classes|`; 1.0 for an empty abstraction.
    pub fn reduction_factor(&self) -> f64 {
        if self.classes.is_empty() {
            1.0
        } else {
            self.num_states() as f64 / self.num_classes() as f64
        }
    }

    pub fn goal_classes(&self) -> Vec<u32> {
        self.classes.iter().filter(|c| c.is_goal).map(|c| c.id).collect()
    }

    /// Classes with state counts per instance.
    pub fn classes_in_instance(&self, instance: usize) -> usize {
        self.class_of[instance].iter().collect::<BTreeSet<_>>().len()
    }

    /// A copy in which class `b` is folded into class `a`. Only useful as a
    /// negative control for [`verify_faithfulness`].
    pub fn with_merged_classes(&self, a: u32, b: u32) -> Abstraction {
        let mut out = self.clone();
        for local in &mut out.class_of {
            for c in local.iter_mut() {
                if *c == b {
                    *c = a;
                }
            }
        }
        out.abstract_succ = out
            .abstract_succ
            .iter()
            .map(|&(x, y)| (if x == b { a } else { x }, if y == b { a } else { y }))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        out
    }

    /// Line format: a header with the reduction factor, one `class` line per
    /// class with its representative's sorted atoms, then `asucc` lines.
    pub fn export_reduced_set(&self, tasks: &[&GroundTask], systems: &[&TransitionSystem]) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# reduced-set v1");
        let _ = writeln!(
            out,
            "states {} classes {} factor {:.3}",
            self.num_states(),
            self.num_classes(),
            self.reduction_factor()
        );
        for c in &self.classes {
            let r = c.representative;
            let atoms = systems[r.instance].states[r.state].atom_names(tasks[r.instance]);
            let _ = writeln!(
                out,
                "class {} vstar {} goal {} rep {}",
                c.id,
                format_vstar(c.vstar),
                c.is_goal as u8,
                atoms.join(" ")
            );
        }
        for &(i, j) in &self.abstract_succ {
            let _ = writeln!(out, "asucc {i} {j}");
        }
        out
    }
}

/// A transition `(s, s')` whose class-mate `t` has no successor in `[s']`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Violation {
    pub s: usize,
    pub s_next: usize,
    pub t: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FaithfulnessReport {
    /// Total number of `(s, s', t)` violations.
    pub violation_count: usize,
    /// The first violations found, at most [`FaithfulnessReport::MAX_LISTED`].
    pub violations: Vec<Violation>,
    /// Pairs of class-mates with different goal flags.
    pub goal_mismatches: Vec<(usize, usize)>,
}

impl FaithfulnessReport {
    pub const MAX_LISTED: usize = 100;

    pub fn is_faithful(&self) -> bool {
        self.violation_count == 0 && self.goal_mismatches.is_empty()
    }
}

/// Exhaustive check that every member of a class has a successor in every
/// class some member transitions into, and that goal flags agree.
pub fn verify_faithfulness(ts: &TransitionSystem, am: &Abstraction, instance: usize) -> FaithfulnessReport {
    let class_of = &am.class_of[instance];
    let mut members: HashMap<u32, Vec<usize>> = HashMap::new();
    for (s, &c) in class_of.iter().enumerate() {
        members.entry(c).or_default().push(s);
    }
    let succ_classes: Vec<BTreeSet<u32>> = ts
        .succ
        .iter()
        .map(|out| out.iter().map(|&j| class_of[j as usize]).collect())
        .collect();
    let mut report = FaithfulnessReport::default();
    let mut keys: Vec<u32> = members.keys().copied().collect();
    keys.sort_unstable();
    for c in keys {
        let ms = &members[&c];
        for &t in &ms[1..] {
            if ts.goal_flags[t] != ts.goal_flags[ms[0]] {
                report.goal_mismatches.push((ms[0], t));
            }
        }
        // One witness transition per target class.
        let mut witness: HashMap<u32, (usize, usize)> = HashMap::new();
        for &s in ms {
            for &j in &ts.succ[s] {
                witness.entry(class_of[j as usize]).or_insert((s, j as usize));
            }
        }
        let mut targets: Vec<u32> = witness.keys().copied().collect();
        targets.sort_unstable();
        for &t in ms {
            for d in &targets {
                if !succ_classes[t].contains(d) {
                    report.violation_count += 1;
                    if report.violations.len() < FaithfulnessReport::MAX_LISTED {
                        let (s, s_next) = witness[d];
                        report.violations.push(Violation { s, s_next, t });
                    }
                }
            }
        }
    }
    report
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LiftError {
    #[error("start state {state} is not in class {class}")]
    StartNotInClass { state: usize, class: u32 },
    #[error("no successor of state {state} lies in class {class} (step {step})")]
    NoSuccessor { step: usize, state: usize, class: u32 },
}

/// Lifts a class sequence to a concrete trajectory starting at `start`,
/// picking at each step the first successor in the next class.
pub fn lift_trajectory(
    ts: &TransitionSystem,
    am: &Abstraction,
    instance: usize,
    trajectory: &[u32],
    start: usize,
) -> Result<Vec<usize>, LiftError> {
    let class_of = &am.class_of[instance];
    let Some(&c0) = trajectory.first() else {
        return Ok(vec![start]);
    };
    if class_of[start] != c0 {
        return Err(LiftError::StartNotInClass { state: start, class: c0 });
    }
    let mut path = vec![start];
    for (step, &c) in trajectory.iter().enumerate().skip(1) {
        let cur = *path.last().unwrap();
        let next = ts.succ[cur]
            .iter()
            .map(|&j| j as usize)
            .find(|&j| class_of[j] == c)
            .ok_or(LiftError::NoSuccessor { step, state: cur, class: c })?;
        path.push(next);
    }
    Ok(path)
}

/// An optimal abstract path from `from` to a goal class, following classes
/// whose cost-to-go decreases by one per step.
pub fn optimal_abstract_path(am: &Abstraction, from: u32) -> Option<Vec<u32>> {
    let mut path = vec![from];
    let mut cur = from;
    let mut v = am.classes[from as usize].vstar?;
    let mut out: HashMap<u32, Vec<u32>> = HashMap::new();
    for &(a, b) in &am.abstract_succ {
        out.entry(a).or_default().push(b);
    }
    while v > 0 {
        let next = *out.get(&cur)?.iter().find(|&&b| am.classes[b as usize].vstar == Some(v - 1))?;
        path.push(next);
        cur = next;
        v -= 1;
    }
    Some(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmarks;
    use crate::pddl::load_task;
    use crate::state_space::expand;

    fn gripper(n: usize) -> (GroundTask, TransitionSystem) {
        let t = load_task(benchmarks::GRIPPER_DOMAIN, &benchmarks::gripper_problem(n)).unwrap();
        let ts = expand(&t, 10_000).unwrap();
        (t, ts)
    }

    #[test]
    fn gripper_six_n_classes() {
        for n in 1..=4 {
            let (t, ts) = gripper(n);
            let am = quotient(&ts, &t).unwrap();
            assert_eq!(am.num_classes(), 6 * n, "n={n}");
        }
    }

    #[test]
    fn identity_quotient_when_nothing_is_symmetric() {
        let t = load_task(
            "(define (domain d) (:predicates (p ?x) (q ?x))
               (:action a :parameters (?x) :precondition (p ?x) :effect (and (q ?x) (not (p ?x)))))",
            "(define (problem x) (:domain d) (:objects o) (:init (p o)) (:goal (q o)))",
        )
        .unwrap();
        let ts = expand(&t, 10).unwrap();
        let am = quotient(&ts, &t).unwrap();
        assert_eq!(am.num_classes(), ts.num_states());
        assert_eq!(am.abstract_succ, [(0, 1)]);
        assert_eq!(am.reduction_factor(), 1.0);
    }

    #[test]
    fn single_state_task_exports_factor_one() {
        let t = load_task(
            "(define (domain d) (:predicates (p)))",
            "(define (problem x) (:domain d) (:init (p)) (:goal (p)))",
        )
        .unwrap();
        let ts = expand(&t, 1).unwrap();
        let am = quotient(&ts, &t).unwrap();
        let text = am.export_reduced_set(&[&t], &[&ts]);
        assert!(text.contains("states 1 classes 1 factor 1.000"));
        assert!(text.contains("class 0 vstar 0 goal 1 rep p p_g"));
    }

    #[test]
    fn faithful_and_negative_control() {
        let (t, ts) = gripper(2);
        let am = quotient(&ts, &t).unwrap();
        assert!(verify_faithfulness(&ts, &am, 0).is_faithful());
        let merged = am.with_merged_classes(am.initial_classes[0], am.goal_classes()[0]);
        let report = verify_faithfulness(&ts, &merged, 0);
        assert!(!report.is_faithful());
    }

    #[test]
    fn lift_optimal_path() {
        let (t, ts) = gripper(2);
        let am = quotient(&ts, &t).unwrap();
        let abs = optimal_abstract_path(&am, am.initial_classes[0]).unwrap();
        let concrete = lift_trajectory(&ts, &am, 0, &abs, ts.initial).unwrap();
        assert_eq!(concrete.len() as u32 - 1, ts.vstar[ts.initial].unwrap());
        assert!(ts.goal_flags[*concrete.last().unwrap()]);
        assert_eq!(lift_trajectory(&ts, &am, 0, &[], 3).unwrap(), [3]);
    }

    #[test]
    fn pooling_merges_only_equal_object_counts() {
        let (t1, ts1) = gripper(1);
        let (t2, ts2) = gripper(2);
        let am = pool(&[(&t1, &ts1), (&t2, &ts2)]).unwrap();
        assert_eq!(am.num_classes(), 6 + 12);
        let again = pool(&[(&t1, &ts1), (&t1, &ts1)]).unwrap();
        assert_eq!(again.num_classes(), 6);
        assert_eq!(again.classes.iter().map(|c| c.members).sum::<usize>(), 16);
    }

    #[test]
    fn representatives_are_pairwise_non_isomorphic() {
        let (t, ts) = gripper(3);
        let am = quotient(&ts, &t).unwrap();
        let legend = ColorLegend::for_task(&t);
        let reps: BTreeSet<CanonicalForm> = am
            .classes
            .iter()
            .map(|c| canonical_form(&build_object_graph(&ts.states[c.representative.state], &t, Encoding::Plain, &legend).graph))
            .collect();
        assert_eq!(reps.len(), am.num_classes());
    }
}
