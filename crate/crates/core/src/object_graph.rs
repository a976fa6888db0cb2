//! Object graphs: a state as a vertex-colored undirected graph.
//!
//! Every object is a vertex colored ⊥. An atom `R(u1,..,uk)` adds `k`
//! positional vertices colored `(R,j)`, each linked to its object `uj` and
//! chained to the next position. A zero-arity atom adds one isolated vertex
//! colored `(R,1)`.

use std::collections::{BTreeSet, HashMap};
use std::fmt::{self, Write};

use crate::graph::ColoredGraph;
use crate::pddl::{Atom, GroundTask, PredicateKind, PredicateSig};
use crate::state_space::State;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Encoding {
    Plain,
    #[serde(rename = "goalmark")]
    GoalMarking,
}

impl Encoding {
    pub const ALL: [Encoding; 2] = [Encoding::Plain, Encoding::GoalMarking];
}

impl fmt::Display for Encoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Encoding::Plain => "plain",
            Encoding::GoalMarking => "goalmark",
        })
    }
}

/// Which variant of a predicate a color refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Marking {
    None,
    /// Goal atom whose base atom holds in the state.
    True,
    /// Goal atom whose base atom does not hold.
    False,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ColorKey {
    Bottom,
    Position { predicate: String, marking: Marking, position: usize },
}

impl fmt::Display for ColorKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ColorKey::Bottom => f.write_str("bottom"),
            ColorKey::Position {
                predicate,
                marking,
                position,
            } => {
                let suffix = match marking {
                    Marking::None => "",
                    Marking::True => ":T",
                    Marking::False => ":F",
                };
                write!(f, "({predicate}{suffix},{position})")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct PredicateColors {
    name: String,
    plain: u32,
    marked: Option<(u32, u32)>,
}

/// Dense color ids for every key of a predicate table. Shared by every
/// graph of a run so that colors are comparable across states and tasks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColorLegend {
    keys: Vec<ColorKey>,
    predicates: Vec<PredicateColors>,
    index: HashMap<ColorKey, u32>,
}

impl ColorLegend {
    pub const BOTTOM: u32 = 0;

    pub fn new(predicates: &[PredicateSig]) -> Self {
        let mut legend = ColorLegend {
            keys: vec![ColorKey::Bottom],
            predicates: Vec::new(),
            index: HashMap::from([(ColorKey::Bottom, 0)]),
        };
        let add = |legend: &mut ColorLegend, name: &str, marking: Marking, arity: usize| {
            let base = legend.keys.len() as u32;
            for position in 1..=arity.max(1) {
                let key = ColorKey::Position {
                    predicate: name.to_string(),
                    marking,
                    position,
                };
                legend.index.insert(key.clone(), legend.keys.len() as u32);
                legend.keys.push(key);
            }
            base
        };
        for p in predicates {
            let plain = add(&mut legend, &p.name, Marking::None, p.arity);
            legend.predicates.push(PredicateColors {
                name: p.name.clone(),
                plain,
                marked: None,
            });
        }
        for (i, p) in predicates.iter().enumerate() {
            if let PredicateKind::Goal { .. } = p.kind {
                let t = add(&mut legend, &p.name, Marking::True, p.arity);
                let f = add(&mut legend, &p.name, Marking::False, p.arity);
                legend.predicates[i].marked = Some((t, f));
            }
        }
        legend
    }

    pub fn for_task(task: &GroundTask) -> Self {
        ColorLegend::new(&task.predicates)
    }

    /// True if `task` has the predicate table this legend was built from.
    pub fn is_compatible(&self, task: &GroundTask) -> bool {
        self.predicates.len() == task.predicates.len()
            && self.predicates.iter().zip(&task.predicates).all(|(a, b)| a.name == b.name)
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn key(&self, color: u32) -> &ColorKey {
        &self.keys[color as usize]
    }

    pub fn color(&self, key: &ColorKey) -> Option<u32> {
        self.index.get(key).copied()
    }

    pub fn keys(&self) -> &[ColorKey] {
        &self.keys
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VertexTag {
    Object(usize),
    Position { atom: Atom, position: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObjectGraph {
    pub graph: ColoredGraph,
    pub provenance: Vec<VertexTag>,
}

/// Builds the object graph of `s`.
pub fn build_object_graph(s: &State, task: &GroundTask, encoding: Encoding, legend: &ColorLegend) -> ObjectGraph {
    debug_assert!(legend.is_compatible(task));
    let holds = |a: &Atom| task.atom_id(a).is_some_and(|id| s.contains(id));
    build_from_atoms(
        task.objects.len(),
        &task.predicates,
        s.atoms().map(|id| &task.atoms[id as usize]),
        holds,
        encoding,
        legend,
    )
}

/// Builds an object graph from an explicit atom list. `holds` decides
/// membership of base atoms for goal marking.
pub fn build_from_atoms<'a>(
    num_objects: usize,
    predicates: &[PredicateSig],
    atoms: impl IntoIterator<Item = &'a Atom>,
    holds: impl Fn(&Atom) -> bool,
    encoding: Encoding,
    legend: &ColorLegend,
) -> ObjectGraph {
    let mut colors = vec![ColorLegend::BOTTOM; num_objects];
    let mut provenance: Vec<VertexTag> = (0..num_objects).map(VertexTag::Object).collect();
    let mut edges = Vec::new();
    for atom in atoms {
        let pc = &legend.predicates[atom.predicate];
        let base = match (encoding, predicates[atom.predicate].kind, pc.marked) {
            (Encoding::GoalMarking, PredicateKind::Goal { of }, Some((t, f))) => {
                let base_atom = Atom {
                    predicate: of,
                    args: atom.args.clone(),
                };
                if holds(&base_atom) {
                    t
                } else {
                    f
                }
            }
            _ => pc.plain,
        };
        let first = colors.len() as u32;
        if atom.args.is_empty() {
            colors.push(base);
            provenance.push(VertexTag::Position {
                atom: atom.clone(),
                position: 1,
            });
            continue;
        }
        for (j, &obj) in atom.args.iter().enumerate() {
            let v = first + j as u32;
            colors.push(base + j as u32);
            provenance.push(VertexTag::Position {
                atom: atom.clone(),
                position: j + 1,
            });
            edges.push((obj as u32, v));
            if j > 0 {
                edges.push((v - 1, v));
            }
        }
    }
    ObjectGraph {
        graph: ColoredGraph::new(colors, edges),
        provenance,
    }
}

/// A state viewed as a relational structure: a universe of objects and one
/// tuple set per predicate of the task's table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Structure {
    pub universe: usize,
    pub relations: Vec<BTreeSet<Vec<usize>>>,
}

impl Structure {
    pub fn from_atoms<'a>(universe: usize, num_predicates: usize, atoms: impl IntoIterator<Item = &'a Atom>) -> Self {
        let mut relations = vec![BTreeSet::new(); num_predicates];
        for a in atoms {
            relations[a.predicate].insert(a.args.clone());
        }
        Structure { universe, relations }
    }

    /// The image under the object permutation `perm`.
    pub fn permuted(&self, perm: &[usize]) -> Structure {
        Structure {
            universe: self.universe,
            relations: self
                .relations
                .iter()
                .map(|r| r.iter().map(|t| t.iter().map(|&u| perm[u]).collect()).collect())
                .collect(),
        }
    }

    pub fn atoms(&self) -> Vec<Atom> {
        self.relations
            .iter()
            .enumerate()
            .flat_map(|(p, r)| {
                r.iter().map(move |t| Atom {
                    predicate: p,
                    args: t.clone(),
                })
            })
            .collect()
    }
}

pub fn relational_structure(s: &State, task: &GroundTask) -> Structure {
    Structure::from_atoms(
        task.objects.len(),
        task.predicates.len(),
        s.atoms().map(|id| &task.atoms[id as usize]),
    )
}

impl ObjectGraph {
    /// `p vcg N M C` header, `n v c` and `e u v` lines, then the legend.
    pub fn dump(&self, legend: &ColorLegend) -> String {
        let g = &self.graph;
        let mut out = String::new();
        let _ = writeln!(out, "p vcg {} {} {}", g.num_vertices(), g.num_edges(), legend.len());
        for v in 0..g.num_vertices() {
            let _ = writeln!(out, "n {v} {}", g.colors()[v]);
        }
        for (u, v) in g.edges() {
            let _ = writeln!(out, "e {u} {v}");
        }
        out.push_str("c legend\n");
        for (id, key) in legend.keys().iter().enumerate() {
            let _ = writeln!(out, "c {id} {key}");
        }
        out
    }
}
