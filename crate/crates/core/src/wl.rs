//! Color refinement (1-WL) and folklore 2-WL over collections of graphs.
//!
//! All graphs of a collection are refined in lockstep with one shared intern
//! table, which is the same as refining their disjoint union; stable colors
//! are therefore comparable across the collection. Refinement stops when a
//! round leaves the number of distinct colors in the union unchanged.

use std::collections::{HashMap, HashSet};
use std::fmt::{self, Write};

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::graph::ColoredGraph;
use crate::object_graph::{build_object_graph, ColorLegend, Encoding};
use crate::pddl::GroundTask;
use crate::state_space::State;

/// Default largest graph, in vertices, that 2-FWL accepts.
pub const DEFAULT_FWL2_MAX_VERTICES: usize = 256;

/// Tag opening every round-0 key, so they never collide with later keys.
const INITIAL_TAG: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub enum Algorithm {
    #[serde(rename = "wl1")]
    Wl1,
    #[serde(rename = "fwl2")]
    Fwl2,
}

impl Algorithm {
    pub const ALL: [Algorithm; 2] = [Algorithm::Wl1, Algorithm::Fwl2];

    pub fn label(self) -> &'static str {
        match self {
            Algorithm::Wl1 => "1-WL",
            Algorithm::Fwl2 => "2-FWL",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::Wl1 => "wl1",
            Algorithm::Fwl2 => "fwl2",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Aggregation {
    Multiset,
    /// Neighbor colors are deduplicated before relabeling. The histogram
    /// itself still counts vertices.
    Set,
}

impl Aggregation {
    pub const ALL: [Aggregation; 2] = [Aggregation::Multiset, Aggregation::Set];
}

impl fmt::Display for Aggregation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Aggregation::Multiset => "multiset",
            Aggregation::Set => "set",
        })
    }
}

/// Injective map from relabel keys to dense color ids.
#[derive(Debug, Clone, Default)]
pub struct InternTable {
    index: HashMap<Vec<u32>, u32>,
    keys: Vec<Vec<u32>>,
}

impl InternTable {
    pub fn intern(&mut self, key: Vec<u32>) -> u32 {
        if let Some(&id) = self.index.get(&key) {
            return id;
        }
        let id = self.keys.len() as u32;
        self.keys.push(key.clone());
        self.index.insert(key, id);
        id
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn key(&self, id: u32) -> &[u32] {
        &self.keys[id as usize]
    }
}

/// Sorted `(color, count)` pairs over vertices (1-WL) or ordered vertex
/// pairs (2-FWL).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ColorHistogram(pub Vec<(u32, u32)>);

impl ColorHistogram {
    pub fn from_colors(colors: &[u32]) -> Self {
        let mut sorted = colors.to_vec();
        sorted.sort_unstable();
        let mut out: Vec<(u32, u32)> = Vec::new();
        for c in sorted {
            match out.last_mut() {
                Some((last, n)) if *last == c => *n += 1,
                _ => out.push((c, 1)),
            }
        }
        ColorHistogram(out)
    }

    pub fn total(&self) -> u64 {
        self.0.iter().map(|&(_, n)| n as u64).sum()
    }

    /// Short hex digest, meaningful only within one run.
    pub fn digest_hex(&self) -> String {
        let mut h = Sha256::new();
        for &(c, n) in &self.0 {
            h.update(c.to_le_bytes());
            h.update(n.to_le_bytes());
        }
        hex::encode(&h.finalize()[..8])
    }
}

impl fmt::Display for ColorHistogram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, (c, n)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "({c},{n})")?;
        }
        f.write_str("]")
    }
}

#[derive(Debug, Clone)]
pub struct WlResult {
    pub histograms: Vec<ColorHistogram>,
    /// Refining rounds performed.
    pub rounds: usize,
    pub intern: InternTable,
}

impl WlResult {
    /// `graph-id : [(color,count),…]` lines followed by the intern legend.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (i, h) in self.histograms.iter().enumerate() {
            let _ = writeln!(out, "{i} : {h}");
        }
        let _ = writeln!(out, "# legend: color = relabel key");
        for (id, key) in self.intern.keys.iter().enumerate() {
            let body: Vec<String> = key
                .iter()
                .map(|&k| if k == INITIAL_TAG { "init".to_string() } else { k.to_string() })
                .collect();
            let _ = writeln!(out, "{id} = <{}>", body.join(" "));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("2-FWL refused graph {graph}: {vertices} vertices exceed the cap of {cap} ({pairs} vertex pairs)")]
pub struct TooLarge {
    pub graph: usize,
    pub vertices: usize,
    pub cap: usize,
    pub pairs: usize,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Stop as soon as every graph has a histogram no other graph shares.
    /// Distinct histograms stay distinct in later rounds, so grouping by
    /// histogram is unaffected; the histograms themselves may not be stable.
    pub stop_when_separated: bool,
}

fn run(
    num_graphs: usize,
    initial_keys: impl Fn(usize) -> Vec<Vec<u32>> + Sync,
    round_keys: impl Fn(usize, &[u32]) -> Vec<Vec<u32>> + Sync,
    opts: RunOptions,
) -> WlResult {
    let mut intern = InternTable::default();
    let intern_all = |intern: &mut InternTable, keys: Vec<Vec<Vec<u32>>>| -> (Vec<Vec<u32>>, usize) {
        let mut distinct = HashSet::new();
        let colors = keys
            .into_iter()
            .map(|ks| {
                ks.into_iter()
                    .map(|k| {
                        let c = intern.intern(k);
                        distinct.insert(c);
                        c
                    })
                    .collect()
            })
            .collect();
        (colors, distinct.len())
    };
    let keys: Vec<Vec<Vec<u32>>> = (0..num_graphs).into_par_iter().map(&initial_keys).collect();
    let (mut colors, mut distinct) = intern_all(&mut intern, keys);
    let mut rounds = 0;
    loop {
        if opts.stop_when_separated && separated(&colors) {
            break;
        }
        let keys: Vec<Vec<Vec<u32>>> = (0..num_graphs)
            .into_par_iter()
            .map(|g| round_keys(g, &colors[g]))
            .collect();
        let (next, next_distinct) = intern_all(&mut intern, keys);
        if next_distinct == distinct {
            break;
        }
        colors = next;
        distinct = next_distinct;
        rounds += 1;
    }
    WlResult {
        histograms: colors.iter().map(|c| ColorHistogram::from_colors(c)).collect(),
        rounds,
        intern,
    }
}

fn separated(colors: &[Vec<u32>]) -> bool {
    let mut seen = HashSet::new();
    colors.iter().all(|c| seen.insert(ColorHistogram::from_colors(c)))
}

pub fn wl1_histograms(graphs: &[&ColoredGraph], agg: Aggregation) -> WlResult {
    wl1_with(graphs, agg, RunOptions::default())
}

pub fn wl1_with(graphs: &[&ColoredGraph], agg: Aggregation, opts: RunOptions) -> WlResult {
    run(
        graphs.len(),
        |g| graphs[g].colors().iter().map(|&c| vec![INITIAL_TAG, c]).collect(),
        |g, colors| {
            let graph = graphs[g];
            (0..graph.num_vertices())
                .map(|v| {
                    let mut key = Vec::with_capacity(1 + graph.neighbors(v as u32).len());
                    key.push(colors[v]);
                    let start = key.len();
                    key.extend(graph.neighbors(v as u32).iter().map(|&u| colors[u as usize]));
                    key[start..].sort_unstable();
                    if agg == Aggregation::Set {
                        dedup_tail(&mut key, start);
                    }
                    key
                })
                .collect()
        },
        opts,
    )
}

/// Deduplicates `key[start..]`, which is sorted, leaving the prefix alone.
fn dedup_tail(key: &mut Vec<u32>, start: usize) {
    let mut tail = key.split_off(start);
    tail.dedup();
    key.extend(tail);
}

pub fn fwl2_histograms(graphs: &[&ColoredGraph], agg: Aggregation, max_vertices: usize) -> Result<WlResult, TooLarge> {
    fwl2_with(graphs, agg, max_vertices, RunOptions::default())
}

pub fn fwl2_with(
    graphs: &[&ColoredGraph],
    agg: Aggregation,
    max_vertices: usize,
    opts: RunOptions,
) -> Result<WlResult, TooLarge> {
    for (i, g) in graphs.iter().enumerate() {
        let n = g.num_vertices();
        if n > max_vertices {
            return Err(TooLarge {
                graph: i,
                vertices: n,
                cap: max_vertices,
                pairs: n * n,
            });
        }
    }
    Ok(run(
        graphs.len(),
        |g| {
            let graph = graphs[g];
            let n = graph.num_vertices() as u32;
            let mut keys = Vec::with_capacity((n * n) as usize);
            for u in 0..n {
                for v in 0..n {
                    keys.push(vec![
                        INITIAL_TAG,
                        graph.color(u),
                        graph.color(v),
                        graph.has_edge(u, v) as u32,
                        (u == v) as u32,
                    ]);
                }
            }
            keys
        },
        |g, colors| {
            let n = graphs[g].num_vertices();
            let at = |u: usize, v: usize| colors[u * n + v];
            let mut keys = Vec::with_capacity(n * n);
            let mut agg_buf: Vec<u64> = Vec::with_capacity(n);
            for u in 0..n {
                for v in 0..n {
                    agg_buf.clear();
                    agg_buf.extend((0..n).map(|w| (at(w, v) as u64) << 32 | at(u, w) as u64));
                    agg_buf.sort_unstable();
                    if agg == Aggregation::Set {
                        agg_buf.dedup();
                    }
                    let mut key = Vec::with_capacity(1 + 2 * agg_buf.len());
                    key.push(at(u, v));
                    for &p in &agg_buf {
                        key.push((p >> 32) as u32);
                        key.push(p as u32);
                    }
                    keys.push(key);
                }
            }
            keys
        },
        opts,
    ))
}

/// Runs `alg` on `graphs` and returns one histogram per graph.
pub fn histograms(
    alg: Algorithm,
    graphs: &[&ColoredGraph],
    agg: Aggregation,
    fwl2_max_vertices: usize,
    opts: RunOptions,
) -> Result<WlResult, TooLarge> {
    match alg {
        Algorithm::Wl1 => Ok(wl1_with(graphs, agg, opts)),
        Algorithm::Fwl2 => fwl2_with(graphs, agg, fwl2_max_vertices, opts),
    }
}

/// True if 1-WL separates the object graphs of `s` and `t`.
pub fn wl1_distinguishes(s: &State, t: &State, task: &GroundTask, encoding: Encoding, agg: Aggregation) -> bool {
    let legend = ColorLegend::for_task(task);
    let gs = build_object_graph(s, task, encoding, &legend);
    let gt = build_object_graph(t, task, encoding, &legend);
    let r = wl1_histograms(&[&gs.graph, &gt.graph], agg);
    r.histograms[0] != r.histograms[1]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycles(sizes: &[u32]) -> ColoredGraph {
        let n: u32 = sizes.iter().sum();
        let mut edges = Vec::new();
        let mut base = 0;
        for &s in sizes {
            edges.extend((0..s).map(|i| (base + i, base + (i + 1) % s)));
            base += s;
        }
        ColoredGraph::new(vec![0; n as usize], edges)
    }

    #[test]
    fn hexagons_vs_dodecagon() {
        let (a, b) = (cycles(&[6, 6]), cycles(&[12]));
        for agg in Aggregation::ALL {
            let r = wl1_histograms(&[&a, &b], agg);
            assert_eq!(r.histograms[0], r.histograms[1]);
            assert_eq!(r.histograms[0].0.len(), 1);
            assert_eq!(r.histograms[0].total(), 12);
            let r = fwl2_histograms(&[&a, &b], agg, 64).unwrap();
            assert_ne!(r.histograms[0], r.histograms[1]);
            assert_eq!(r.histograms[0].total(), 144);
        }
    }

    #[test]
    fn path_vs_triangle() {
        let p3 = ColoredGraph::new(vec![0; 3], [(0, 1), (1, 2)]);
        let tri = cycles(&[3]);
        let r = wl1_histograms(&[&p3, &tri], Aggregation::Multiset);
        assert_ne!(r.histograms[0], r.histograms[1]);
    }

    #[test]
    fn union_fixpoint_not_per_graph() {
        // Each graph alone is stable at round 0, yet the union is not.
        let empty = ColoredGraph::new(vec![0; 2], []);
        let edge = ColoredGraph::new(vec![0; 2], [(0, 1)]);
        let r = wl1_histograms(&[&empty, &edge], Aggregation::Multiset);
        assert_ne!(r.histograms[0], r.histograms[1]);
        assert_eq!(r.rounds, 1);
    }

    #[test]
    fn set_variant_loses_counts() {
        // Two centers with 2+2 leaves vs 3+1 leaves: as sets every center sees {leaf}.
        let a = ColoredGraph::new(vec![1, 1, 0, 0, 0, 0], [(0, 2), (0, 3), (1, 4), (1, 5)]);
        let b = ColoredGraph::new(vec![1, 1, 0, 0, 0, 0], [(0, 2), (0, 3), (0, 4), (1, 5)]);
        let m = wl1_histograms(&[&a, &b], Aggregation::Multiset);
        let s = wl1_histograms(&[&a, &b], Aggregation::Set);
        assert_ne!(m.histograms[0], m.histograms[1]);
        assert_eq!(s.histograms[0], s.histograms[1]);
    }

    #[test]
    fn fwl2_cap_reports_requirement() {
        let g = cycles(&[10]);
        let err = fwl2_histograms(&[&g], Aggregation::Multiset, 8).unwrap_err();
        assert_eq!((err.vertices, err.cap, err.pairs), (10, 8, 100));
    }

    #[test]
    fn early_stop_keeps_grouping() {
        let gs = [cycles(&[6, 6]), cycles(&[12]), ColoredGraph::new(vec![0; 12], (0..11).map(|i| (i, i + 1)))];
        let refs: Vec<&ColoredGraph> = gs.iter().collect();
        let full = wl1_histograms(&refs, Aggregation::Multiset);
        let fast = wl1_with(&refs, Aggregation::Multiset, RunOptions { stop_when_separated: true });
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(full.histograms[i] == full.histograms[j], fast.histograms[i] == fast.histograms[j]);
            }
        }
    }

    #[test]
    fn dump_lists_graphs_and_legend() {
        let g = cycles(&[3]);
        let r = wl1_histograms(&[&g], Aggregation::Multiset);
        let d = r.dump();
        assert!(d.starts_with("0 : [(0,3)]\n"));
        assert!(d.contains("0 = <init 0>"));
    }
}
