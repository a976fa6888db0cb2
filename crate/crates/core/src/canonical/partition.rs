use crate::graph::ColoredGraph;

/// An ordered partition of the vertex set, stored flat: `order` lists the
/// vertices cell by cell and `starts` holds each cell's first position.
/// Members of a cell are kept in increasing vertex order; only the cell
/// order carries meaning.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderedPartition {
    order: Vec<u32>,
    starts: Vec<u32>,
    cell_of: Vec<u32>,
}

impl OrderedPartition {
    pub fn from_cells(cells: Vec<Vec<u32>>) -> Self {
        let n: usize = cells.iter().map(Vec::len).sum();
        let mut cell_of = vec![u32::MAX; n];
        let mut order = Vec::with_capacity(n);
        let mut starts = Vec::with_capacity(cells.len());
        for (i, mut c) in cells.into_iter().enumerate() {
            assert!(!c.is_empty(), "empty cell");
            c.sort_unstable();
            starts.push(order.len() as u32);
            for &v in &c {
                assert!(cell_of[v as usize] == u32::MAX, "vertex {v} in two cells");
                cell_of[v as usize] = i as u32;
            }
            order.extend(c);
        }
        OrderedPartition { order, starts, cell_of }
    }

    /// One cell per color, ordered by color value.
    pub fn from_colors(colors: &[u32]) -> Self {
        let mut order: Vec<u32> = (0..colors.len() as u32).collect();
        order.sort_by_key(|&v| (colors[v as usize], v));
        let mut starts = Vec::new();
        let mut cell_of = vec![0u32; colors.len()];
        for (i, &v) in order.iter().enumerate() {
            if i == 0 || colors[order[i - 1] as usize] != colors[v as usize] {
                starts.push(i as u32);
            }
            cell_of[v as usize] = starts.len() as u32 - 1;
        }
        OrderedPartition { order, starts, cell_of }
    }

    fn range(&self, i: usize) -> (usize, usize) {
        let end = self.starts.get(i + 1).map_or(self.order.len(), |&e| e as usize);
        (self.starts[i] as usize, end)
    }

    pub fn cell(&self, i: usize) -> &[u32] {
        let (a, b) = self.range(i);
        &self.order[a..b]
    }

    pub fn cells(&self) -> impl ExactSizeIterator<Item = &[u32]> + '_ {
        (0..self.starts.len()).map(|i| self.cell(i))
    }

    pub fn num_cells(&self) -> usize {
        self.starts.len()
    }

    pub fn num_vertices(&self) -> usize {
        self.cell_of.len()
    }

    pub fn cell_of(&self, v: u32) -> u32 {
        self.cell_of[v as usize]
    }

    pub fn is_discrete(&self) -> bool {
        self.starts.len() == self.cell_of.len()
    }

    /// Smallest non-singleton cell, earliest on ties.
    pub fn target_cell(&self) -> Option<usize> {
        (0..self.num_cells())
            .map(|i| (i, self.range(i)))
            .filter(|(_, (a, b))| b - a > 1)
            .min_by_key(|(i, (a, b))| (b - a, *i))
            .map(|(i, _)| i)
    }

    /// Splits `v` off its cell; the singleton goes first, in place.
    pub fn individualize(&self, v: u32) -> Self {
        let c = self.cell_of(v) as usize;
        let (a, b) = self.range(c);
        let mut out = self.clone();
        if b - a == 1 {
            return out;
        }
        out.order[a] = v;
        let mut k = a + 1;
        for &u in &self.order[a..b] {
            if u != v {
                out.order[k] = u;
                k += 1;
            }
        }
        out.starts.insert(c + 1, a as u32 + 1);
        for &u in &out.order[a + 1..] {
            out.cell_of[u as usize] += 1;
        }
        out
    }
}

/// Coarsest equitable partition refining `p`.
///
/// Each round recolors every vertex by the sorted list of its neighbors'
/// cell indices and splits cells accordingly; the pieces of a cell are
/// ordered by that signature. Stops when a round splits nothing.
pub fn refine(g: &ColoredGraph, p: &OrderedPartition) -> OrderedPartition {
    let n = g.num_vertices();
    // Signatures live in one flat buffer, vertex v at offset[v]..offset[v+1].
    let mut offset = Vec::with_capacity(n + 1);
    offset.push(0usize);
    for v in 0..n as u32 {
        offset.push(offset[v as usize] + g.neighbors(v).len());
    }
    let mut sig = vec![0u32; offset[n]];
    let mut cur = p.clone();
    let mut starts = Vec::with_capacity(n);
    loop {
        starts.clear();
        let mut split = false;
        for i in 0..cur.num_cells() {
            let (a, b) = cur.range(i);
            starts.push(a as u32);
            if b - a == 1 {
                continue;
            }
            for &v in &cur.order[a..b] {
                let s = &mut sig[offset[v as usize]..offset[v as usize + 1]];
                for (slot, &u) in s.iter_mut().zip(g.neighbors(v)) {
                    *slot = cur.cell_of[u as usize];
                }
                s.sort_unstable();
            }
            let key = |v: u32| &sig[offset[v as usize]..offset[v as usize + 1]];
            let first = key(cur.order[a]);
            if cur.order[a + 1..b].iter().all(|&v| key(v) == first) {
                continue;
            }
            split = true;
            // Ties broken by vertex id keep each piece in increasing order.
            cur.order[a..b].sort_by(|&x, &y| key(x).cmp(key(y)).then(x.cmp(&y)));
            for k in a + 1..b {
                if key(cur.order[k]) != key(cur.order[k - 1]) {
                    starts.push(k as u32);
                }
            }
        }
        if !split {
            return cur;
        }
        std::mem::swap(&mut cur.starts, &mut starts);
        for i in 0..cur.num_cells() {
            let (a, b) = cur.range(i);
            for &v in &cur.order[a..b] {
                cur.cell_of[v as usize] = i as u32;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: u32) -> ColoredGraph {
        ColoredGraph::new(vec![0; n as usize], (0..n).map(|i| (i, (i + 1) % n)))
    }

    fn cell_sets(p: &OrderedPartition) -> Vec<Vec<u32>> {
        p.cells().map(|c| c.to_vec()).collect()
    }

    #[test]
    fn regular_graph_is_stable() {
        let g = cycle(6);
        let p = refine(&g, &OrderedPartition::from_colors(g.colors()));
        assert_eq!(p.num_cells(), 1);
    }

    #[test]
    fn path_splits_endpoints_from_middle() {
        let g = ColoredGraph::new(vec![0; 3], [(0, 1), (1, 2)]);
        let p = refine(&g, &OrderedPartition::from_colors(g.colors()));
        // Endpoints have signature [0], the middle [0, 0].
        assert_eq!(cell_sets(&p), [vec![0, 2], vec![1]]);
    }

    #[test]
    fn two_hexagons_and_dodecagon_both_stay_one_cell() {
        let two = ColoredGraph::new(vec![0; 12], (0..6).map(|i| (i, (i + 1) % 6)).chain((0..6).map(|i| (6 + i, 6 + (i + 1) % 6))));
        let one = cycle(12);
        for g in [two, one] {
            assert_eq!(refine(&g, &OrderedPartition::from_colors(g.colors())).num_cells(), 1);
        }
    }

    #[test]
    fn individualize_keeps_position() {
        let p = OrderedPartition::from_cells(vec![vec![0], vec![1, 2, 3], vec![4]]);
        let q = p.individualize(2);
        assert_eq!(cell_sets(&q), [vec![0], vec![2], vec![1, 3], vec![4]]);
        assert_eq!(q.target_cell(), Some(2));
    }

    #[test]
    fn refinement_is_equitable() {
        let g = ColoredGraph::new(vec![0, 0, 0, 0, 1], [(0, 1), (1, 2), (2, 3), (3, 4)]);
        let p = refine(&g, &OrderedPartition::from_colors(g.colors()));
        for cell in p.cells() {
            let counts = |v: u32| {
                let mut c: Vec<u32> = g.neighbors(v).iter().map(|&u| p.cell_of(u)).collect();
                c.sort_unstable();
                c
            };
            assert!(cell.iter().all(|&v| counts(v) == counts(cell[0])));
        }
        assert!(p.is_discrete());
    }
}
