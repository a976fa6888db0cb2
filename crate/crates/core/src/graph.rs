//! Vertex-colored undirected simple graphs.

/// Adjacency lists are sorted and free of duplicates and self-loops.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ColoredGraph {
    colors: Vec<u32>,
    adj: Vec<Vec<u32>>,
    num_edges: usize,
}

impl ColoredGraph {
    /// Builds a graph, dropping self-loops and duplicate edges.
    pub fn new(colors: Vec<u32>, edges: impl IntoIterator<Item = (u32, u32)>) -> Self {
        let n = colors.len();
        let mut adj = vec![Vec::new(); n];
        for (u, v) in edges {
            assert!((u as usize) < n && (v as usize) < n, "edge ({u},{v}) out of range for {n} vertices");
            if u != v {
                adj[u as usize].push(v);
                adj[v as usize].push(u);
            }
        }
        let mut num_edges = 0;
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
            num_edges += list.len();
        }
        ColoredGraph {
            colors,
            adj,
            num_edges: num_edges / 2,
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.colors.len()
    }

    pub fn num_edges(&self) -> usize {
        self.num_edges
    }

    pub fn colors(&self) -> &[u32] {
        &self.colors
    }

    pub fn color(&self, v: u32) -> u32 {
        self.colors[v as usize]
    }

    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.adj[v as usize]
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        self.adj[u as usize].binary_search(&v).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u as u32).map(move |&v| (u as u32, v)))
    }

    /// The image of the graph under `perm`: vertex `v` becomes `perm[v]`.
    pub fn relabel(&self, perm: &[u32]) -> ColoredGraph {
        assert_eq!(perm.len(), self.num_vertices());
        let mut colors = vec![0; self.num_vertices()];
        for (v, &p) in perm.iter().enumerate() {
            colors[p as usize] = self.colors[v];
        }
        ColoredGraph::new(colors, self.edges().map(|(u, v)| (perm[u as usize], perm[v as usize])))
    }

    /// True if `perm` maps the graph onto itself, colors included.
    pub fn is_automorphism(&self, perm: &[u32]) -> bool {
        perm.len() == self.num_vertices()
            && (0..self.num_vertices()).all(|v| self.colors[v] == self.colors[perm[v] as usize])
            && self.edges().all(|(u, v)| self.has_edge(perm[u as usize], perm[v as usize]))
    }

    /// Sorted `(color, count)` pairs of the vertex coloring.
    pub fn color_counts(&self) -> Vec<(u32, u32)> {
        let mut sorted = self.colors.clone();
        sorted.sort_unstable();
        let mut out: Vec<(u32, u32)> = Vec::new();
        for c in sorted {
            match out.last_mut() {
                Some((last, n)) if *last == c => *n += 1,
                _ => out.push((c, 1)),
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_graph_normalization() {
        let g = ColoredGraph::new(vec![0, 0, 1], [(0, 1), (1, 0), (2, 2), (1, 2)]);
        assert_eq!(g.num_edges(), 2);
        assert_eq!(g.edges().collect::<Vec<_>>(), [(0, 1), (1, 2)]);
        assert_eq!(g.color_counts(), [(0, 2), (1, 1)]);
    }

    #[test]
    fn relabel_and_automorphism() {
        let path = ColoredGraph::new(vec![0, 1, 0], [(0, 1), (1, 2)]);
        assert!(path.is_automorphism(&[2, 1, 0]));
        assert!(!path.is_automorphism(&[1, 0, 2]));
        let r = path.relabel(&[1, 2, 0]);
        assert_eq!(r.colors(), [0, 0, 1]);
        assert!(r.has_edge(1, 2) && r.has_edge(2, 0));
    }
}
