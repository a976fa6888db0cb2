use std::collections::{HashMap, HashSet};
use std::fmt;

use super::model::*;
use super::GOAL_SUFFIX;

pub type AtomId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PredicateKind {
    /// Compiled from a type declaration.
    Type,
    /// Declared but never touched by an effect.
    Static,
    Fluent,
    /// Goal copy of predicate `of`.
    Goal { of: usize },
}

impl PredicateKind {
    /// True for predicates whose atoms are identical in every state.
    pub fn is_constant(self) -> bool {
        !matches!(self, PredicateKind::Fluent)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredicateSig {
    pub name: String,
    pub arity: usize,
    pub kind: PredicateKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub predicate: usize,
    pub args: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundAction {
    pub schema: usize,
    pub args: Vec<usize>,
    pub pre_pos: Vec<AtomId>,
    pub pre_neg: Vec<AtomId>,
    pub add: Vec<AtomId>,
    pub del: Vec<AtomId>,
}

#[derive(Debug, Clone, Copy)]
pub struct GroundOptions {
    pub max_actions: usize,
}

impl Default for GroundOptions {
    fn default() -> Self {
        GroundOptions { max_actions: 1_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GroundError {
    #[error("grounding produced more than {cap} actions ({count} so far, while grounding '{schema}')")]
    TooManyActions { schema: String, count: usize, cap: usize },
    #[error("action {action} adds and deletes {atom}")]
    EffectCollision { action: String, atom: String },
}

/// A grounded STRIPS task. Immutable once built.
#[derive(Debug, Clone)]
pub struct GroundTask {
    pub domain_name: String,
    pub instance_name: String,
    /// Domain predicates in domain order, followed by their goal copies.
    pub predicates: Vec<PredicateSig>,
    pub objects: Vec<String>,
    pub schema_names: Vec<String>,
    pub atoms: Vec<Atom>,
    atom_index: HashMap<Atom, AtomId>,
    pub actions: Vec<GroundAction>,
    /// Sorted atom ids, including the minted goal atoms.
    pub initial_state: Vec<AtomId>,
    /// Sorted ids of the goal atoms `p(o..)` (not their `p_g` copies).
    pub goal: Vec<AtomId>,
}

impl GroundTask {
    pub fn num_atoms(&self) -> usize {
        self.atoms.len()
    }

    pub fn atom_id(&self, atom: &Atom) -> Option<AtomId> {
        self.atom_index.get(atom).copied()
    }

    pub fn predicate_index(&self, name: &str) -> Option<usize> {
        self.predicates.iter().position(|p| p.name == name)
    }

    pub fn object_index(&self, name: &str) -> Option<usize> {
        self.objects.iter().position(|o| o == name)
    }

    pub fn is_constant_atom(&self, id: AtomId) -> bool {
        self.predicates[self.atoms[id as usize].predicate].kind.is_constant()
    }

    pub fn format_atom(&self, atom: &Atom) -> String {
        let name = &self.predicates[atom.predicate].name;
        if atom.args.is_empty() {
            return name.clone();
        }
        let args: Vec<&str> = atom.args.iter().map(|&o| self.objects[o].as_str()).collect();
        format!("{name}({})", args.join(","))
    }

    pub fn atom_name(&self, id: AtomId) -> String {
        self.format_atom(&self.atoms[id as usize])
    }

    pub fn action_name(&self, index: usize) -> String {
        let a = &self.actions[index];
        let args: Vec<&str> = a.args.iter().map(|&o| self.objects[o].as_str()).collect();
        format!("{}({})", self.schema_names[a.schema], args.join(","))
    }

    /// Parses `pred(a,b)`, `pred` or `(pred a b)` against this task's tables.
    /// The atom need not be in the grounded universe.
    pub fn parse_atom(&self, text: &str) -> Result<Atom, String> {
        let text = text.trim();
        let (name, args): (&str, Vec<&str>) = if let Some(inner) = text.strip_prefix('(') {
            let inner = inner
                .strip_suffix(')')
                .ok_or_else(|| format!("unbalanced atom '{text}'"))?;
            let mut parts = inner.split_whitespace();
            let name = parts.next().ok_or_else(|| format!("empty atom '{text}'"))?;
            (name, parts.collect())
        } else if let Some(open) = text.find('(') {
            let inner = text[open + 1..]
                .strip_suffix(')')
                .ok_or_else(|| format!("unbalanced atom '{text}'"))?;
            let args = inner.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
            (text[..open].trim(), args)
        } else {
            (text, Vec::new())
        };
        let name = name.to_lowercase();
        let predicate = self
            .predicate_index(&name)
            .ok_or_else(|| format!("unknown predicate '{name}'"))?;
        let arity = self.predicates[predicate].arity;
        if arity != args.len() {
            return Err(format!("'{name}' takes {arity} arguments, got {}", args.len()));
        }
        let args = args
            .iter()
            .map(|a| {
                let a = a.to_lowercase();
                self.object_index(&a).ok_or_else(|| format!("unknown object '{a}'"))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Atom { predicate, args })
    }
}

struct Interner {
    atoms: Vec<Atom>,
    index: HashMap<Atom, AtomId>,
}

impl Interner {
    fn intern(&mut self, atom: Atom) -> AtomId {
        if let Some(&id) = self.index.get(&atom) {
            return id;
        }
        let id = self.atoms.len() as AtomId;
        self.atoms.push(atom.clone());
        self.index.insert(atom, id);
        id
    }
}

fn instantiate(t: &AtomTemplate, binding: &[usize]) -> Atom {
    Atom {
        predicate: t.predicate,
        args: t
            .args
            .iter()
            .map(|a| match a {
                Term::Var(i) => binding[*i],
                Term::Const(c) => *c,
            })
            .collect(),
    }
}

fn max_var(t: &AtomTemplate) -> Option<usize> {
    t.args
        .iter()
        .filter_map(|a| match a {
            Term::Var(i) => Some(*i),
            Term::Const(_) => None,
        })
        .max()
}

/// Grounds every type-consistent binding of every schema.
///
/// Bindings are pruned when a static precondition is decided false by the
/// initial state or when the precondition requires an atom both true and
/// false. Static literals are dropped from surviving actions since they hold
/// in every reachable state.
pub fn ground(dom: &DomainModel, inst: &InstanceModel, opts: &GroundOptions) -> Result<GroundTask, GroundError> {
    let is_static = dom.static_predicates();
    let n = dom.predicates.len();
    let mut predicates: Vec<PredicateSig> = dom
        .predicates
        .iter()
        .enumerate()
        .map(|(i, p)| PredicateSig {
            name: p.name.clone(),
            arity: p.arity,
            kind: match (p.origin, is_static[i]) {
                (PredicateOrigin::Type, _) => PredicateKind::Type,
                (_, true) => PredicateKind::Static,
                (_, false) => PredicateKind::Fluent,
            },
        })
        .collect();
    predicates.extend(dom.predicates.iter().enumerate().map(|(i, p)| PredicateSig {
        name: format!("{}{}", p.name, GOAL_SUFFIX),
        arity: p.arity,
        kind: PredicateKind::Goal { of: i },
    }));

    let mut interner = Interner {
        atoms: Vec::new(),
        index: HashMap::new(),
    };
    let to_atom = |g: &GroundAtom| Atom {
        predicate: g.predicate,
        args: g.args.clone(),
    };
    let mut initial: Vec<AtomId> = inst.init.iter().map(|g| interner.intern(to_atom(g))).collect();
    for g in &inst.goal {
        initial.push(interner.intern(Atom {
            predicate: g.predicate + n,
            args: g.args.clone(),
        }));
    }
    let mut goal: Vec<AtomId> = inst.goal.iter().map(|g| interner.intern(to_atom(g))).collect();
    initial.sort_unstable();
    initial.dedup();
    goal.sort_unstable();
    goal.dedup();

    let init_set: HashSet<Atom> = inst.init.iter().map(to_atom).collect();

    // Candidate objects per declared type.
    let candidates_for = |ty: &str| -> Vec<usize> {
        (0..inst.objects.len())
            .filter(|&o| ty == OBJECT_TYPE || dom.type_closure(&inst.objects[o].ty).iter().any(|t| t == ty))
            .collect()
    };

    let mut actions = Vec::new();
    for (si, schema) in dom.schemas.iter().enumerate() {
        let k = schema.parameters.len();
        let domains: Vec<Vec<usize>> = schema.parameters.iter().map(|p| candidates_for(&p.ty)).collect();
        // Static literals are checked as soon as their last variable is bound.
        let mut checks_at: Vec<Vec<&Literal>> = vec![Vec::new(); k + 1];
        for lit in &schema.precondition {
            if is_static[lit.atom.predicate] {
                let depth = max_var(&lit.atom).map_or(0, |v| v + 1);
                checks_at[depth].push(lit);
            }
        }
        let static_ok = |binding: &[usize], depth: usize| {
            checks_at[depth]
                .iter()
                .all(|lit| init_set.contains(&instantiate(&lit.atom, binding)) == lit.positive)
        };
        if !static_ok(&[], 0) {
            continue;
        }

        let mut binding = vec![0usize; k];
        let mut choice = vec![0usize; k];
        let mut depth = 0usize;
        // Iterative backtracking in lexicographic order of candidate indices.
        loop {
            if depth == k {
                if let Some(action) = build_action(dom, schema, si, &binding, &is_static, &mut interner, inst)? {
                    actions.push(action);
                    if actions.len() > opts.max_actions {
                        return Err(GroundError::TooManyActions {
                            schema: schema.name.clone(),
                            count: actions.len(),
                            cap: opts.max_actions,
                        });
                    }
                }
                if k == 0 {
                    break;
                }
                depth -= 1;
                choice[depth] += 1;
                continue;
            }
            if choice[depth] >= domains[depth].len() {
                if depth == 0 {
                    break;
                }
                choice[depth] = 0;
                depth -= 1;
                choice[depth] += 1;
                continue;
            }
            binding[depth] = domains[depth][choice[depth]];
            if static_ok(&binding, depth + 1) {
                depth += 1;
                if depth < k {
                    choice[depth] = 0;
                }
            } else {
                choice[depth] += 1;
            }
        }
    }

    Ok(GroundTask {
        domain_name: dom.name.clone(),
        instance_name: inst.name.clone(),
        predicates,
        objects: inst.objects.iter().map(|o| o.name.clone()).collect(),
        schema_names: dom.schemas.iter().map(|s| s.name.clone()).collect(),
        atoms: interner.atoms,
        atom_index: interner.index,
        actions,
        initial_state: initial,
        goal,
    })
}

fn build_action(
    dom: &DomainModel,
    schema: &ActionSchema,
    si: usize,
    binding: &[usize],
    is_static: &[bool],
    interner: &mut Interner,
    inst: &InstanceModel,
) -> Result<Option<GroundAction>, GroundError> {
    let mut pos = Vec::new();
    let mut neg = Vec::new();
    for lit in &schema.precondition {
        if is_static[lit.atom.predicate] {
            continue;
        }
        let a = instantiate(&lit.atom, binding);
        if lit.positive {
            pos.push(a);
        } else {
            neg.push(a);
        }
    }
    if pos.iter().any(|a| neg.contains(a)) {
        return Ok(None);
    }
    let add: Vec<Atom> = schema.add_effects.iter().map(|t| instantiate(t, binding)).collect();
    let del: Vec<Atom> = schema.del_effects.iter().map(|t| instantiate(t, binding)).collect();
    if let Some(a) = add.iter().find(|a| del.contains(a)) {
        let args: Vec<&str> = binding.iter().map(|&o| inst.objects[o].name.as_str()).collect();
        let pname = &dom.predicates[a.predicate].name;
        let aargs: Vec<&str> = a.args.iter().map(|&o| inst.objects[o].name.as_str()).collect();
        return Err(GroundError::EffectCollision {
            action: format!("{}({})", schema.name, args.join(",")),
            atom: format!("{pname}({})", aargs.join(",")),
        });
    }
    let mut ids = |v: Vec<Atom>| {
        let mut ids: Vec<AtomId> = v.into_iter().map(|a| interner.intern(a)).collect();
        ids.sort_unstable();
        ids.dedup();
        ids
    };
    Ok(Some(GroundAction {
        schema: si,
        args: binding.to_vec(),
        pre_pos: ids(pos),
        pre_neg: ids(neg),
        add: ids(add),
        del: ids(del),
    }))
}

impl fmt::Display for GroundTask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}/{}: {} objects, {} atoms, {} actions",
            self.domain_name,
            self.instance_name,
            self.objects.len(),
            self.atoms.len(),
            self.actions.len()
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmarks;
    use crate::pddl::{parse_domain, parse_instance};

    fn task(domain: &str, instance: &str) -> GroundTask {
        let dom = parse_domain(domain).unwrap();
        let inst = parse_instance(instance, &dom).unwrap();
        ground(&dom, &inst, &GroundOptions::default()).unwrap()
    }

    #[test]
    fn gripper_one_ball_bindings() {
        let t = task(benchmarks::GRIPPER_DOMAIN, &benchmarks::gripper_problem(1));
        let mut names: Vec<String> = (0..t.actions.len()).map(|i| t.action_name(i)).collect();
        names.sort();
        // 2 ordered room pairs; pick and drop for 1 ball x 2 rooms x 2 grippers.
        let mut expected = vec![
            "move(rooma,roomb)".to_string(),
            "move(roomb,rooma)".to_string(),
        ];
        for op in ["pick", "drop"] {
            for r in ["rooma", "roomb"] {
                for g in ["left", "right"] {
                    expected.push(format!("{op}(ball1,{r},{g})"));
                }
            }
        }
        expected.sort();
        assert_eq!(names, expected);
    }

    #[test]
    fn zero_parameter_schema_gives_one_action() {
        let t = task(
            "(define (domain d) (:predicates (p) (q))
               (:action a :parameters () :precondition (p) :effect (and (q) (not (p)))))",
            "(define (problem x) (:domain d) (:init (p)) (:goal (q)))",
        );
        assert_eq!(t.actions.len(), 1);
        assert!(t.actions[0].args.is_empty());
    }

    #[test]
    fn goal_atoms_minted_into_initial_state() {
        let t = task(benchmarks::GRIPPER_DOMAIN, &benchmarks::gripper_problem(2));
        let at_g = t.predicate_index("at_g").unwrap();
        let minted: Vec<AtomId> = t
            .initial_state
            .iter()
            .copied()
            .filter(|&a| t.atoms[a as usize].predicate == at_g)
            .collect();
        assert_eq!(minted.len(), 2);
        assert_eq!(t.goal.len(), 2);
        for &g in &t.goal {
            let mut a = t.atoms[g as usize].clone();
            a.predicate = at_g;
            assert!(minted.contains(&t.atom_id(&a).unwrap()));
        }
        assert!(matches!(t.predicates[at_g].kind, PredicateKind::Goal { .. }));
    }

    #[test]
    fn static_infeasible_bindings_pruned() {
        let t = task(
            "(define (domain d) (:predicates (link ?a ?b) (at ?a))
               (:action go :parameters (?a ?b) :precondition (and (at ?a) (link ?a ?b)) :effect (and (at ?b) (not (at ?a)))))",
            "(define (problem x) (:domain d) (:objects u v w) (:init (at u) (link u v) (link v w)) (:goal (at w)))",
        );
        let names: Vec<String> = (0..t.actions.len()).map(|i| t.action_name(i)).collect();
        assert_eq!(names, ["go(u,v)", "go(v,w)"]);
        // link atoms stay in the universe but not in preconditions.
        assert!(t.actions.iter().all(|a| a.pre_pos.len() == 1));
    }

    #[test]
    fn effect_collision_is_an_error() {
        let dom = parse_domain(
            "(define (domain d) (:predicates (p ?x))
               (:action a :parameters (?x ?y) :effect (and (p ?x) (not (p ?y)))))",
        )
        .unwrap();
        let inst = parse_instance("(define (problem x) (:domain d) (:objects o) (:init) (:goal (p o)))", &dom).unwrap();
        let err = ground(&dom, &inst, &GroundOptions::default()).unwrap_err();
        assert!(matches!(err, GroundError::EffectCollision { .. }), "{err}");
    }

    #[test]
    fn action_cap_reports_counts() {
        let dom = parse_domain(benchmarks::GRIPPER_DOMAIN).unwrap();
        let inst = parse_instance(&benchmarks::gripper_problem(3), &dom).unwrap();
        let err = ground(&dom, &inst, &GroundOptions { max_actions: 5 }).unwrap_err();
        assert!(matches!(err, GroundError::TooManyActions { cap: 5, count: 6, .. }), "{err}");
    }

    #[test]
    fn atom_text_forms() {
        let t = task(benchmarks::GRIPPER_DOMAIN, &benchmarks::gripper_problem(1));
        let a = t.parse_atom("at(ball1, rooma)").unwrap();
        assert_eq!(t.parse_atom("(AT ball1 rooma)").unwrap(), a);
        assert_eq!(t.format_atom(&a), "at(ball1,rooma)");
        assert!(t.parse_atom("at(ball1)").is_err());
        assert!(t.parse_atom("at(ball9,rooma)").is_err());
    }
}
