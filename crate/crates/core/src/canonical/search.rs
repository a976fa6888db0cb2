//! Canonical labeling by individualization-refinement.
//!
//! Leaves of the search tree are compared by the key (node-invariant
//! sequence along the path, serialized graph). The minimum key over all
//! leaves is relabeling-invariant, so its serialization is a canonical form.
//!
//! Two prunings keep the tree small:
//! * a node whose invariant prefix already exceeds the best leaf's is cut;
//! * leaves with equal serializations yield automorphisms. Children of a node
//!   in one orbit of the automorphisms fixing the node's path are equivalent,
//!   so only one per orbit is searched. When a leaf matches the first leaf
//!   and the automorphism maps the current path onto the first path up to
//!   their divergence point, the search jumps back to that point.

use std::cmp::Ordering;

use sha2::{Digest, Sha256};

use super::partition::{refine, OrderedPartition};
use crate::graph::ColoredGraph;

/// Isomorphism-invariant serialization of a colored graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalForm {
    digest: [u8; 16],
    bytes: Vec<u8>,
}

impl CanonicalForm {
    pub fn from_bytes(bytes: Vec<u8>) -> Self {
        let full = Sha256::digest(&bytes);
        let mut digest = [0u8; 16];
        digest.copy_from_slice(&full[..16]);
        CanonicalForm { digest, bytes }
    }

    pub fn bytes(&self) -> &[u8] {
        &self.bytes
    }

    /// First 16 bytes of the SHA-256 of [`bytes`](Self::bytes).
    pub fn digest(&self) -> [u8; 16] {
        self.digest
    }

    pub fn digest_hex(&self) -> String {
        hex::encode(self.digest)
    }
}

fn serialize(g: &ColoredGraph, lab: &[u32]) -> Vec<u8> {
    let n = g.num_vertices();
    let mut colors = vec![0u32; n];
    for v in 0..n {
        colors[lab[v] as usize] = g.colors()[v];
    }
    let mut edges: Vec<(u32, u32)> = g
        .edges()
        .map(|(u, v)| {
            let (a, b) = (lab[u as usize], lab[v as usize]);
            (a.min(b), a.max(b))
        })
        .collect();
    edges.sort_unstable();
    let mut out = Vec::with_capacity(4 * (2 + n + 2 * edges.len()));
    out.extend_from_slice(&(n as u32).to_le_bytes());
    out.extend_from_slice(&(edges.len() as u32).to_le_bytes());
    for c in colors {
        out.extend_from_slice(&c.to_le_bytes());
    }
    for (a, b) in edges {
        out.extend_from_slice(&a.to_le_bytes());
        out.extend_from_slice(&b.to_le_bytes());
    }
    out
}

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0100_0000_01b3;

fn fnv(h: &mut u64, x: u32) {
    for b in x.to_le_bytes() {
        *h ^= b as u64;
        *h = h.wrapping_mul(FNV_PRIME);
    }
}

/// Hash of the quotient graph of an equitable partition: per cell its size,
/// color and sorted neighbor-cell list.
fn node_invariant(g: &ColoredGraph, p: &OrderedPartition) -> u64 {
    let mut h = FNV_OFFSET;
    fnv(&mut h, p.num_cells() as u32);
    let mut nbr = Vec::new();
    for cell in p.cells() {
        let v = cell[0];
        fnv(&mut h, cell.len() as u32);
        fnv(&mut h, g.color(v));
        nbr.clear();
        nbr.extend(g.neighbors(v).iter().map(|&u| p.cell_of(u)));
        nbr.sort_unstable();
        fnv(&mut h, nbr.len() as u32);
        for &c in &nbr {
            fnv(&mut h, c);
        }
    }
    h
}

#[derive(Clone)]
struct Leaf {
    path: Vec<u32>,
    invariants: Vec<u64>,
    bytes: Vec<u8>,
    /// Position -> vertex.
    inverse: Vec<u32>,
    labeling: Vec<u32>,
}

/// Counters from one search, for diagnostics and tests.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub nodes: usize,
    pub leaves: usize,
    pub generators: usize,
}

struct Search<'g> {
    g: &'g ColoredGraph,
    first: Option<Leaf>,
    best: Option<Leaf>,
    generators: Vec<Vec<u32>>,
    stats: SearchStats,
}

fn find(parent: &mut [u32], mut x: u32) -> u32 {
    while parent[x as usize] != x {
        parent[x as usize] = parent[parent[x as usize] as usize];
        x = parent[x as usize];
    }
    x
}

impl<'g> Search<'g> {
    fn leaf(&mut self, p: &OrderedPartition, path: &[u32], inv: &[u64]) -> Option<usize> {
        self.stats.leaves += 1;
        let n = self.g.num_vertices();
        let labeling: Vec<u32> = (0..n as u32).map(|v| p.cell_of(v)).collect();
        let mut inverse = vec![0u32; n];
        for (v, &l) in labeling.iter().enumerate() {
            inverse[l as usize] = v as u32;
        }
        let bytes = serialize(self.g, &labeling);
        let leaf = Leaf {
            path: path.to_vec(),
            invariants: inv.to_vec(),
            bytes,
            inverse,
            labeling,
        };
        let Some(first) = &self.first else {
            self.first = Some(leaf.clone());
            self.best = Some(leaf);
            return None;
        };
        if leaf.bytes == first.bytes {
            let gamma: Vec<u32> = leaf.labeling.iter().map(|&l| first.inverse[l as usize]).collect();
            let c = path.iter().zip(&first.path).take_while(|(a, b)| a == b).count();
            let jump = c < path.len()
                && c < first.path.len()
                && path[..c].iter().all(|&v| gamma[v as usize] == v)
                && gamma[path[c] as usize] == first.path[c];
            self.add_generator(gamma);
            return jump.then_some(c);
        }
        let best = self.best.as_ref().unwrap();
        let ord = (&leaf.invariants, &leaf.bytes).cmp(&(&best.invariants, &best.bytes));
        match ord {
            Ordering::Less => self.best = Some(leaf),
            Ordering::Equal => {
                let best = self.best.as_ref().unwrap();
                let gamma: Vec<u32> = leaf.labeling.iter().map(|&l| best.inverse[l as usize]).collect();
                self.add_generator(gamma);
            }
            Ordering::Greater => {}
        }
        None
    }

    fn add_generator(&mut self, gamma: Vec<u32>) {
        debug_assert!(self.g.is_automorphism(&gamma));
        if gamma.iter().enumerate().all(|(v, &w)| v as u32 == w) || self.generators.contains(&gamma) {
            return;
        }
        self.generators.push(gamma);
        self.stats.generators += 1;
    }

    /// Orbit representatives of the generators that fix `path` pointwise.
    fn orbits(&self, path: &[u32]) -> Vec<u32> {
        let n = self.g.num_vertices();
        let mut parent: Vec<u32> = (0..n as u32).collect();
        for gamma in &self.generators {
            if path.iter().all(|&v| gamma[v as usize] == v) {
                for (v, &w) in gamma.iter().enumerate() {
                    let (a, b) = (find(&mut parent, v as u32), find(&mut parent, w));
                    if a != b {
                        parent[a.max(b) as usize] = a.min(b);
                    }
                }
            }
        }
        (0..n as u32).map(|v| find(&mut parent, v)).collect()
    }

    fn exceeds_best(&self, inv: &[u64]) -> bool {
        let Some(best) = &self.best else { return false };
        for (a, b) in inv.iter().zip(&best.invariants) {
            match a.cmp(b) {
                Ordering::Less => return false,
                Ordering::Greater => return true,
                Ordering::Equal => {}
            }
        }
        false
    }

    /// Returns `Some(d)` to unwind to the node at depth `d`.
    fn visit(&mut self, p: &OrderedPartition, path: &mut Vec<u32>, inv: &mut Vec<u64>) -> Option<usize> {
        self.stats.nodes += 1;
        let Some(target) = p.target_cell() else {
            return self.leaf(p, path, inv);
        };
        let depth = path.len();
        let cell = p.cell(target).to_vec();
        let mut explored: Vec<u32> = Vec::new();
        for &w in &cell {
            if !explored.is_empty() {
                let orbit = self.orbits(path);
                if explored.iter().any(|&x| orbit[x as usize] == orbit[w as usize]) {
                    continue;
                }
            }
            explored.push(w);
            let child = refine(self.g, &p.individualize(w));
            path.push(w);
            inv.push(node_invariant(self.g, &child));
            let res = if self.exceeds_best(inv) {
                None
            } else {
                self.visit(&child, path, inv)
            };
            path.pop();
            inv.pop();
            if let Some(d) = res {
                if d < depth {
                    return Some(d);
                }
            }
        }
        None
    }
}

/// Canonical labeling (vertex -> position), the form, and search counters.
pub fn canonical_labeling(g: &ColoredGraph) -> (Vec<u32>, CanonicalForm, SearchStats) {
    let root = refine(g, &OrderedPartition::from_colors(g.colors()));
    let mut search = Search {
        g,
        first: None,
        best: None,
        generators: Vec::new(),
        stats: SearchStats::default(),
    };
    let mut inv = vec![node_invariant(g, &root)];
    search.visit(&root, &mut Vec::new(), &mut inv);
    let best = search.best.take().expect("search reaches at least one leaf");
    (best.labeling, CanonicalForm::from_bytes(best.bytes), search.stats)
}

pub fn canonical_form(g: &ColoredGraph) -> CanonicalForm {
    canonical_labeling(g).1
}
