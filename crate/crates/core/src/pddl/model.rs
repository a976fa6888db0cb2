use std::collections::HashMap;

/// Root of the type hierarchy. It never becomes a predicate.
pub const OBJECT_TYPE: &str = "object";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeDecl {
    pub name: String,
    pub parent: String,
}

/// A variable or object together with its declared type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypedName {
    pub name: String,
    pub ty: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PredicateOrigin {
    /// Listed under `:predicates`.
    Declared,
    /// Compiled from a `:types` entry.
    Type,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Predicate {
    pub name: String,
    pub arity: usize,
    pub origin: PredicateOrigin,
    /// Declared parameter list; empty for type predicates.
    pub parameters: Vec<TypedName>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Term {
    /// Index into the schema's parameter list.
    Var(usize),
    /// Index into the domain constant list.
    Const(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtomTemplate {
    pub predicate: usize,
    pub args: Vec<Term>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Literal {
    pub positive: bool,
    pub atom: AtomTemplate,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionSchema {
    pub name: String,
    pub parameters: Vec<TypedName>,
    pub precondition: Vec<Literal>,
    pub add_effects: Vec<AtomTemplate>,
    pub del_effects: Vec<AtomTemplate>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DomainModel {
    pub name: String,
    pub requirements: Vec<String>,
    pub types: Vec<TypeDecl>,
    pub constants: Vec<TypedName>,
    /// Type predicates first (declaration order), then declared predicates.
    pub predicates: Vec<Predicate>,
    /// `goal_predicates[i]` is the goal copy of `predicates[i]`.
    pub goal_predicates: Vec<Predicate>,
    pub schemas: Vec<ActionSchema>,
}

impl DomainModel {
    pub fn predicate_index(&self, name: &str) -> Option<usize> {
        self.predicates.iter().position(|p| p.name == name)
    }

    pub fn is_goal_predicate_name(&self, name: &str) -> bool {
        self.goal_predicates.iter().any(|p| p.name == name)
    }

    /// Declared type names, excluding `object`.
    pub fn type_names(&self) -> impl Iterator<Item = &str> {
        self.types.iter().map(|t| t.name.as_str())
    }

    /// `ty` followed by its ancestors, stopping before `object`.
    pub fn type_closure(&self, ty: &str) -> Vec<String> {
        let parents: HashMap<&str, &str> = self
            .types
            .iter()
            .map(|t| (t.name.as_str(), t.parent.as_str()))
            .collect();
        let mut out = Vec::new();
        let mut cur = ty;
        while cur != OBJECT_TYPE {
            if out.iter().any(|t| t == cur) {
                break;
            }
            out.push(cur.to_string());
            match parents.get(cur) {
                Some(p) => cur = p,
                None => break,
            }
        }
        out
    }

    /// Predicates that no schema ever adds or deletes.
    pub fn static_predicates(&self) -> Vec<bool> {
        let mut is_static = vec![true; self.predicates.len()];
        for schema in &self.schemas {
            for a in schema.add_effects.iter().chain(&schema.del_effects) {
                is_static[a.predicate] = false;
            }
        }
        is_static
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroundAtom {
    pub predicate: usize,
    /// Indices into [`InstanceModel::objects`].
    pub args: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceModel {
    pub name: String,
    pub domain_name: String,
    /// Domain constants first, then `:objects`.
    pub objects: Vec<TypedName>,
    /// How many leading entries of `objects` are domain constants.
    pub num_constants: usize,
    /// Includes the compiled type-membership atoms, deduplicated in first-seen order.
    pub init: Vec<GroundAtom>,
    pub goal: Vec<GroundAtom>,
}

impl InstanceModel {
    pub fn object_index(&self, name: &str) -> Option<usize> {
        self.objects.iter().position(|o| o.name == name)
    }
}
