//! Simple undirected graphs over dense 1-based vertex ids.
//!
//! Both the variable co-occurrence graph and the variable/clause bipartite
//! graph of a CNF formula are represented this way, as are argumentation
//! frameworks once their direction is dropped for decomposition purposes.

use std::collections::BTreeSet;

/// Undirected simple graph. Vertices are `1..=num_vertices`; self-loops and
/// parallel edges are not representable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    num_vertices: usize,
    adj: Vec<Vec<u32>>,
}

impl Graph {
    pub fn new(num_vertices: usize) -> Self {
        Graph {
            num_vertices,
            adj: vec![Vec::new(); num_vertices + 1],
        }
    }

    /// Builds a graph from an edge list, ignoring duplicates and self-loops.
    pub fn from_edges(num_vertices: usize, edges: impl IntoIterator<Item = (u32, u32)>) -> Self {
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            assert!(u >= 1 && v >= 1, "vertex ids are 1-based");
            assert!(
                u as usize <= num_vertices && v as usize <= num_vertices,
                "vertex id out of range"
            );
            if u == v {
                continue;
            }
            set.insert((u.min(v), u.max(v)));
        }
        let mut g = Graph::new(num_vertices);
        for (u, v) in set {
            g.adj[u as usize].push(v);
            g.adj[v as usize].push(u);
        }
        g
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.adj.iter().map(|n| n.len()).sum::<usize>() / 2
    }

    pub fn vertices(&self) -> impl Iterator<Item = u32> + '_ {
        (1..=self.num_vertices as u32).into_iter()
    }

    /// Neighbors of `v` in ascending order.
    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.adj[v as usize]
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        self.adj[u as usize].binary_search(&v).is_ok()
    }

    /// All edges as (u, v) with u < v, in lexicographic order.
    pub fn edges(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::with_capacity(self.num_edges());
        for u in self.vertices() {
            for &v in self.neighbors(u) {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }
}
