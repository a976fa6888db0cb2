//! Exhaustive isomorphism tests, used as oracles for the canonical forms.

use crate::graph::ColoredGraph;
use crate::object_graph::Structure;

/// Largest universe the structure oracle accepts by default.
pub const DEFAULT_STRUCTURE_BOUND: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("universe of {size} objects exceeds the brute-force bound of {bound}")]
pub struct BoundExceeded {
    pub size: usize,
    pub bound: usize,
}

/// Color- and edge-preserving bijection search with backtracking.
pub fn graphs_isomorphic(a: &ColoredGraph, b: &ColoredGraph) -> bool {
    let n = a.num_vertices();
    if n != b.num_vertices() || a.num_edges() != b.num_edges() || a.color_counts() != b.color_counts() {
        return false;
    }
    let mut map = vec![u32::MAX; n];
    let mut used = vec![false; n];
    extend_graph_map(a, b, 0, &mut map, &mut used)
}

fn extend_graph_map(a: &ColoredGraph, b: &ColoredGraph, v: usize, map: &mut [u32], used: &mut [bool]) -> bool {
    if v == a.num_vertices() {
        return true;
    }
    let vu = v as u32;
    for w in 0..b.num_vertices() as u32 {
        if used[w as usize]
            || a.color(vu) != b.color(w)
            || a.neighbors(vu).len() != b.neighbors(w).len()
            || !(0..v).all(|u| a.has_edge(vu, u as u32) == b.has_edge(w, map[u]))
        {
            continue;
        }
        map[v] = w;
        used[w as usize] = true;
        if extend_graph_map(a, b, v + 1, map, used) {
            return true;
        }
        used[w as usize] = false;
    }
    map[v] = u32::MAX;
    false
}

/// True iff some permutation of the universe maps every relation of `a`
/// exactly onto the same relation of `b`.
pub fn brute_force_isomorphic(a: &Structure, b: &Structure, bound: usize) -> Result<bool, BoundExceeded> {
    let size = a.universe.max(b.universe);
    if size > bound {
        return Err(BoundExceeded { size, bound });
    }
    if a.universe != b.universe
        || a.relations.len() != b.relations.len()
        || a.relations.iter().zip(&b.relations).any(|(x, y)| x.len() != y.len())
    {
        return Ok(false);
    }
    // Tuples grouped by the largest object they mention, so each is checked
    // as soon as all its objects are mapped.
    let mut by_last: Vec<Vec<(usize, &Vec<usize>)>> = vec![Vec::new(); a.universe];
    for (r, tuples) in a.relations.iter().enumerate() {
        for t in tuples {
            // Zero-arity tuples: equal cardinalities already decide them.
            if let Some(&m) = t.iter().max() {
                by_last[m].push((r, t));
            }
        }
    }
    let mut sigma = vec![usize::MAX; a.universe];
    let mut used = vec![false; a.universe];
    Ok(extend_structure_map(a, b, &by_last, 0, &mut sigma, &mut used))
}

fn extend_structure_map(
    a: &Structure,
    b: &Structure,
    by_last: &[Vec<(usize, &Vec<usize>)>],
    u: usize,
    sigma: &mut [usize],
    used: &mut [bool],
) -> bool {
    if u == a.universe {
        return true;
    }
    for w in 0..a.universe {
        if used[w] {
            continue;
        }
        sigma[u] = w;
        let consistent = by_last[u].iter().all(|(r, t)| {
            let image: Vec<usize> = t.iter().map(|&x| sigma[x]).collect();
            b.relations[*r].contains(&image)
        });
        if consistent {
            used[w] = true;
            if extend_structure_map(a, b, by_last, u + 1, sigma, used) {
                return true;
            }
            used[w] = false;
        }
    }
    sigma[u] = usize::MAX;
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn graph_oracle_basics() {
        let p3 = ColoredGraph::new(vec![0; 3], [(0, 1), (1, 2)]);
        let p3b = ColoredGraph::new(vec![0; 3], [(2, 0), (0, 1)]);
        let tri = ColoredGraph::new(vec![0; 3], [(0, 1), (1, 2), (2, 0)]);
        assert!(graphs_isomorphic(&p3, &p3b));
        assert!(!graphs_isomorphic(&p3, &tri));
        let colored = ColoredGraph::new(vec![1, 0, 0], [(0, 1), (1, 2)]);
        let colored_mid = ColoredGraph::new(vec![0, 1, 0], [(0, 1), (1, 2)]);
        assert!(!graphs_isomorphic(&colored, &colored_mid));
    }

    #[test]
    fn structure_oracle_and_bound() {
        let a = Structure {
            universe: 3,
            relations: vec![BTreeSet::from([vec![0, 1]]), BTreeSet::from([vec![2]])],
        };
        let b = a.permuted(&[2, 0, 1]);
        assert!(brute_force_isomorphic(&a, &b, 8).unwrap());
        let c = Structure {
            universe: 3,
            relations: vec![BTreeSet::from([vec![0, 1]]), BTreeSet::from([vec![1]])],
        };
        assert!(!brute_force_isomorphic(&a, &c, 8).unwrap());
        let big = Structure {
            universe: 9,
            relations: vec![],
        };
        assert_eq!(
            brute_force_isomorphic(&big, &big, 8),
            Err(BoundExceeded { size: 9, bound: 8 })
        );
    }
}
