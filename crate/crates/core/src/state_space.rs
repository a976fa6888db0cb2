//! Explicit breadth-first expansion of the reachable state space and
//! optimal cost-to-go by backward BFS from the goal states.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write;

use crate::pddl::{AtomId, GroundAction, GroundTask};

/// Default cap on the number of reachable states.
pub const DEFAULT_STATE_CAP: usize = 10_000;

/// A set of atom ids stored as a bitset over the task's atom universe.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct State {
    bits: Box<[u64]>,
}

impl State {
    pub fn empty(num_atoms: usize) -> Self {
        State {
            bits: vec![0u64; num_atoms.div_ceil(64)].into_boxed_slice(),
        }
    }

    pub fn from_atoms(num_atoms: usize, atoms: impl IntoIterator<Item = AtomId>) -> Self {
        let mut s = State::empty(num_atoms);
        for a in atoms {
            s.insert(a);
        }
        s
    }

    pub fn initial(task: &GroundTask) -> Self {
        State::from_atoms(task.num_atoms(), task.initial_state.iter().copied())
    }

    /// The task's static, type and goal atoms plus `fluents`.
    pub fn with_constant_atoms(task: &GroundTask, fluents: impl IntoIterator<Item = AtomId>) -> Self {
        let mut s = State::from_atoms(
            task.num_atoms(),
            task.initial_state.iter().copied().filter(|&a| task.is_constant_atom(a)),
        );
        for a in fluents {
            s.insert(a);
        }
        s
    }

    /// Builds a state from fluent atom names such as `at(ball1,rooma)`;
    /// constant atoms are added automatically.
    pub fn from_fluent_names<S: AsRef<str>>(task: &GroundTask, names: &[S]) -> Result<Self, String> {
        let mut ids = Vec::new();
        for n in names {
            let atom = task.parse_atom(n.as_ref())?;
            let id = task
                .atom_id(&atom)
                .ok_or_else(|| format!("atom '{}' is not in the grounded universe", n.as_ref()))?;
            ids.push(id);
        }
        Ok(State::with_constant_atoms(task, ids))
    }

    #[inline]
    /// Parses a state dump: atoms as `p(a,b)` or `(p a b)`, separated by
    /// whitespace, `#` starting a comment. Constant atoms may be listed but
    /// must agree with the initial state.
    pub fn parse_text(task: &GroundTask, text: &str) -> Result<Self, String> {
        let mut names = Vec::new();
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("");
            let mut rest = line.trim_start();
            while !rest.is_empty() {
                let end = if rest.starts_with('(') {
                    rest.find(')').map(|i| i + 1)
                } else {
                    match (rest.find(char::is_whitespace), rest.find('(')) {
                        (Some(ws), Some(open)) if open < ws => rest.find(')').map(|i| i + 1),
                        (Some(ws), _) => Some(ws),
                        (None, _) => Some(rest.len()),
                    }
                }
                .ok_or_else(|| format!("unbalanced atom in '{}'", line.trim()))?;
                names.push(&rest[..end]);
                rest = rest[end..].trim_start();
            }
        }
        let init = State::initial(task);
        let mut ids = Vec::with_capacity(names.len());
        for n in names {
            let atom = task.parse_atom(n)?;
            let id = task
                .atom_id(&atom)
                .ok_or_else(|| format!("atom '{n}' is not in the grounded universe"))?;
            if task.is_constant_atom(id) && !init.contains(id) {
                return Err(format!("atom '{n}' is constant and false in every state"));
            }
            ids.push(id);
        }
        Ok(State::with_constant_atoms(task, ids))
    }

    pub fn contains(&self, a: AtomId) -> bool {
        let a = a as usize;
        self.bits.get(a / 64).is_some_and(|w| w >> (a % 64) & 1 == 1)
    }

    #[inline]
    pub fn insert(&mut self, a: AtomId) {
        let a = a as usize;
        self.bits[a / 64] |= 1 << (a % 64);
    }

    #[inline]
    pub fn remove(&mut self, a: AtomId) {
        let a = a as usize;
        self.bits[a / 64] &= !(1 << (a % 64));
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    /// Atom ids in increasing order.
    pub fn atoms(&self) -> impl Iterator<Item = AtomId> + '_ {
        self.bits.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros();
                w &= w - 1;
                Some((i * 64) as AtomId + b)
            })
        })
    }

    /// Sorted textual atom names.
    pub fn atom_names(&self, task: &GroundTask) -> Vec<String> {
        let mut names: Vec<String> = self.atoms().map(|a| task.atom_name(a)).collect();
        names.sort();
        names
    }
}

pub fn is_goal(s: &State, task: &GroundTask) -> bool {
    task.goal.iter().all(|&g| s.contains(g))
}

pub fn is_applicable(s: &State, a: &GroundAction) -> bool {
    a.pre_pos.iter().all(|&p| s.contains(p)) && !a.pre_neg.iter().any(|&p| s.contains(p))
}

pub fn apply(s: &State, a: &GroundAction) -> State {
    let mut t = s.clone();
    for &d in &a.del {
        t.remove(d);
    }
    for &p in &a.add {
        t.insert(p);
    }
    t
}

/// Applicable actions (by index into `task.actions`) and their results.
pub fn successors(s: &State, task: &GroundTask) -> Vec<(usize, State)> {
    task.actions
        .iter()
        .enumerate()
        .filter(|(_, a)| is_applicable(s, a))
        .map(|(i, a)| (i, apply(s, a)))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("state cap exceeded: more than {limit} reachable states ({frontier} still unexpanded)")]
pub struct StateCapExceeded {
    pub limit: usize,
    pub frontier: usize,
}

/// The reachable, unlabeled state model of a task.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionSystem {
    /// In BFS discovery order; the initial state is index 0.
    pub states: Vec<State>,
    pub initial: usize,
    /// Successor indices per state, deduplicated, in first-seen order.
    pub succ: Vec<Vec<u32>>,
    pub goal_flags: Vec<bool>,
    /// Optimal plan length; `None` for dead ends.
    pub vstar: Vec<Option<u32>>,
}

/// Breadth-first expansion with exact duplicate detection. Fails rather
/// than truncating when more than `limit` states are reachable.
pub fn expand(task: &GroundTask, limit: usize) -> Result<TransitionSystem, StateCapExceeded> {
    assert!(limit > 0, "state limit must be positive");
    let init = State::initial(task);
    let mut index: HashMap<State, u32> = HashMap::new();
    let mut states = vec![init.clone()];
    index.insert(init, 0);
    let mut succ: Vec<Vec<u32>> = Vec::new();
    let mut next = 0usize;
    while next < states.len() {
        let mut out: Vec<u32> = Vec::new();
        for a in &task.actions {
            if !is_applicable(&states[next], a) {
                continue;
            }
            let t = apply(&states[next], a);
            let j = match index.get(&t) {
                Some(&j) => j,
                None => {
                    if states.len() == limit {
                        return Err(StateCapExceeded {
                            limit,
                            frontier: states.len() - next,
                        });
                    }
                    let j = states.len() as u32;
                    index.insert(t.clone(), j);
                    states.push(t);
                    j
                }
            };
            if !out.contains(&j) {
                out.push(j);
            }
        }
        succ.push(out);
        next += 1;
    }
    let goal_flags = states.iter().map(|s| is_goal(s, task)).collect();
    let mut ts = TransitionSystem {
        vstar: vec![None; states.len()],
        states,
        initial: 0,
        succ,
        goal_flags,
    };
    ts.compute_vstar();
    Ok(ts)
}

impl TransitionSystem {
    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_transitions(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn transitions(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.succ
            .iter()
            .enumerate()
            .flat_map(|(i, out)| out.iter().map(move |&j| (i, j as usize)))
    }

    pub fn state_index(&self, s: &State) -> Option<usize> {
        self.states.iter().position(|t| t == s)
    }

    /// Backward BFS from all goal states over the reversed successor relation.
    pub fn compute_vstar(&mut self) {
        let n = self.states.len();
        let mut pred: Vec<Vec<u32>> = vec![Vec::new(); n];
        for (i, j) in self.transitions() {
            pred[j].push(i as u32);
        }
        let mut vstar = vec![None; n];
        let mut queue = VecDeque::new();
        for (i, &g) in self.goal_flags.iter().enumerate() {
            if g {
                vstar[i] = Some(0);
                queue.push_back(i);
            }
        }
        while let Some(j) = queue.pop_front() {
            let d = vstar[j].unwrap() + 1;
            for &i in &pred[j] {
                if vstar[i as usize].is_none() {
                    vstar[i as usize] = Some(d);
                    queue.push_back(i as usize);
                }
            }
        }
        self.vstar = vstar;
    }

    /// `(value, count)` pairs sorted by value; dead ends come last as `None`.
    pub fn vstar_histogram(&self) -> Vec<(Option<u32>, usize)> {
        let mut hist: Vec<(Option<u32>, usize)> = Vec::new();
        let mut values = self.vstar.clone();
        values.sort_by_key(|v| v.unwrap_or(u32::MAX));
        for v in values {
            match hist.last_mut() {
                Some((last, c)) if *last == v => *c += 1,
                _ => hist.push((v, 1)),
            }
        }
        hist
    }

    /// Line format: `states N transitions M`, one line of sorted atom names
    /// per state, then one `i j` line per transition.
    pub fn to_text(&self, task: &GroundTask) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "states {} transitions {}", self.num_states(), self.num_transitions());
        for s in &self.states {
            let _ = writeln!(out, "{}", s.atom_names(task).join(" "));
        }
        for (i, j) in self.transitions() {
            let _ = writeln!(out, "{i} {j}");
        }
        out
    }
}

pub fn format_vstar(v: Option<u32>) -> String {
    v.map_or_else(|| "inf".to_string(), |v| v.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmarks::{self, gripper_reachable_states};
    use crate::pddl::load_task;

    fn gripper(n: usize) -> GroundTask {
        load_task(benchmarks::GRIPPER_DOMAIN, &benchmarks::gripper_problem(n)).unwrap()
    }

    #[test]
    fn state_dump_forms() {
        let t = gripper(1);
        let a = State::parse_text(&t, "at-robot(rooma) free(left)\n(free right) # comment\n  at(ball1, rooma)\n").unwrap();
        assert_eq!(a, State::initial(&t));
        assert!(State::parse_text(&t, "at(ball1,rooma").unwrap_err().contains("unbalanced"));
        assert!(State::parse_text(&t, "at_g(ball1,rooma)").is_err());
        assert!(State::parse_text(&t, "ball(ball1) at-robot(rooma)").is_ok());
    }

    #[test]
    fn bitset_ops() {
        let mut s = State::from_atoms(130, [0, 64, 129]);
        assert!(s.contains(64) && !s.contains(63));
        s.remove(64);
        s.insert(5);
        assert_eq!(s.atoms().collect::<Vec<_>>(), [0, 5, 129]);
        assert_eq!(s.len(), 3);
    }

    #[test]
    fn gripper_initial_successors() {
        let t = gripper(1);
        let s = State::initial(&t);
        let mut names: Vec<String> = successors(&s, &t).iter().map(|(a, _)| t.action_name(*a)).collect();
        names.sort();
        assert_eq!(names, ["move(rooma,roomb)", "pick(ball1,rooma,left)", "pick(ball1,rooma,right)"]);
    }

    #[test]
    fn pick_then_drop_is_identity() {
        let t = gripper(2);
        let s = State::initial(&t);
        let pick = (0..t.actions.len()).find(|&i| t.action_name(i) == "pick(ball2,rooma,right)").unwrap();
        let drop = (0..t.actions.len()).find(|&i| t.action_name(i) == "drop(ball2,rooma,right)").unwrap();
        let mid = apply(&s, &t.actions[pick]);
        assert_ne!(mid, s);
        assert!(is_applicable(&mid, &t.actions[drop]));
        assert_eq!(apply(&mid, &t.actions[drop]), s);
    }

    #[test]
    fn dead_end_has_no_successors() {
        let t = load_task(
            "(define (domain d) (:predicates (p) (q))
               (:action a :parameters () :precondition (p) :effect (and (q) (not (p)))))",
            "(define (problem x) (:domain d) (:init (p)) (:goal (p)))",
        )
        .unwrap();
        let ts = expand(&t, 10).unwrap();
        assert_eq!(ts.num_states(), 2);
        assert!(successors(&ts.states[1], &t).is_empty());
        assert_eq!(ts.vstar, [Some(0), None]);
    }

    #[test]
    fn goal_initial_without_actions() {
        let t = load_task(
            "(define (domain d) (:predicates (p)))",
            "(define (problem x) (:domain d) (:init (p)) (:goal (p)))",
        )
        .unwrap();
        let ts = expand(&t, 1).unwrap();
        assert_eq!((ts.num_states(), ts.num_transitions()), (1, 0));
        assert_eq!(ts.vstar, [Some(0)]);
    }

    #[test]
    fn empty_goal_everything_is_goal() {
        let t = load_task(
            "(define (domain d) (:predicates (p) (q))
               (:action a :parameters () :precondition (p) :effect (and (q) (not (p)))))",
            "(define (problem x) (:domain d) (:init (p)) (:goal (and)))",
        )
        .unwrap();
        let ts = expand(&t, 10).unwrap();
        assert!(ts.goal_flags.iter().all(|&g| g));
    }

    #[test]
    fn gripper_counts_match_closed_form() {
        for n in 1..=5 {
            let ts = expand(&gripper(n), 100_000).unwrap();
            assert_eq!(ts.num_states() as u64, gripper_reachable_states(n), "n={n}");
        }
        assert_eq!(gripper_reachable_states(1), 8);
    }

    #[test]
    fn gripper_one_ball_vstar() {
        let ts = expand(&gripper(1), 100).unwrap();
        assert_eq!(ts.vstar[ts.initial], Some(3));
    }

    #[test]
    fn cap_is_an_error_not_a_truncation() {
        let err = expand(&gripper(1), 5).unwrap_err();
        assert_eq!(err.limit, 5);
        assert!(err.frontier > 0);
        assert!(err.to_string().contains("state cap exceeded"));
    }

    #[test]
    fn bellman_and_goal_atoms_static() {
        let t = gripper(3);
        let ts = expand(&t, 10_000).unwrap();
        let goal_atoms: Vec<AtomId> = t
            .initial_state
            .iter()
            .copied()
            .filter(|&a| matches!(t.predicates[t.atoms[a as usize].predicate].kind, crate::pddl::PredicateKind::Goal { .. }))
            .collect();
        for (i, s) in ts.states.iter().enumerate() {
            for &g in &goal_atoms {
                assert!(s.contains(g));
            }
            assert_eq!(ts.goal_flags[i], ts.vstar[i] == Some(0));
            if !ts.goal_flags[i] {
                let best = ts.succ[i].iter().filter_map(|&j| ts.vstar[j as usize]).min();
                assert_eq!(ts.vstar[i], best.map(|b| b + 1));
            }
        }
    }

    #[test]
    fn expansion_is_deterministic() {
        let t = gripper(3);
        assert_eq!(expand(&t, 10_000).unwrap(), expand(&t, 10_000).unwrap());
    }

    #[test]
    fn text_export_shape() {
        let t = gripper(1);
        let ts = expand(&t, 100).unwrap();
        let text = ts.to_text(&t);
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), format!("states 8 transitions {}", ts.num_transitions()));
        assert!(lines.next().unwrap().contains("at-robot(rooma)"));
        assert_eq!(text.lines().count(), 1 + 8 + ts.num_transitions());
    }
}
