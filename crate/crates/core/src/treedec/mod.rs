//! Tree decompositions: construction, validation, normal forms, and file I/O.

mod heuristics;
mod nice;
mod pace;

pub use heuristics::{decompose, exact_small, Strategy};
pub use nice::{make_nice, NiceNode, NiceNodeKind, NiceTreeDecomposition};
pub use pace::{parse_td, write_td, TdError};

use crate::graph::Graph;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TreedecError {
    #[error("decomposition has no nodes")]
    Empty,
    #[error("graph has {vertices} vertices, exceeding the exact-search cap of {cap}")]
    TooLarge { vertices: usize, cap: usize },
}

/// A tree of bags over the vertices of some graph. Node ids are indices into
/// the bag list; bags are kept sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeDecomposition {
    num_vertices: usize,
    bags: Vec<Vec<u32>>,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
}

/// One failed decomposition condition, with enough context to point at the
/// offending part of the tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// The node/edge structure is not a single tree.
    NotATree,
    /// A bag mentions a vertex the graph does not have.
    BagOutOfRange { node: usize, vertex: u32 },
    /// A graph vertex appears in no bag.
    VertexNotCovered { vertex: u32 },
    /// A graph edge has no bag containing both endpoints.
    EdgeNotCovered { u: u32, v: u32 },
    /// The bags holding `vertex` fall apart into separate components;
    /// `node_a` and `node_b` lie in different ones.
    VertexDisconnected { vertex: u32, node_a: usize, node_b: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl TreeDecomposition {
    pub fn new(num_vertices: usize) -> Self {
        TreeDecomposition {
            num_vertices,
            bags: Vec::new(),
            edges: Vec::new(),
            adj: Vec::new(),
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_nodes(&self) -> usize {
        self.bags.len()
    }

    pub fn add_bag(&mut self, mut bag: Vec<u32>) -> usize {
        bag.sort_unstable();
        bag.dedup();
        self.bags.push(bag);
        self.adj.push(Vec::new());
        self.bags.len() - 1
    }

    pub fn add_edge(&mut self, a: usize, b: usize) {
        assert!(a != b && a < self.bags.len() && b < self.bags.len());
        self.edges.push((a.min(b), a.max(b)));
        self.adj[a].push(b);
        self.adj[b].push(a);
    }

    pub fn bag(&self, node: usize) -> &[u32] {
        &self.bags[node]
    }

    pub fn bags(&self) -> impl Iterator<Item = (usize, &[u32])> {
        self.bags.iter().enumerate().map(|(i, b)| (i, b.as_slice()))
    }

    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.adj[node]
    }

    pub fn tree_edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Replaces the bag contents of a node (used by rewrites that keep the
    /// tree shape). The new bag is sorted and deduplicated.
    pub fn set_bag(&mut self, node: usize, mut bag: Vec<u32>) {
        bag.sort_unstable();
        bag.dedup();
        self.bags[node] = bag;
    }

    /// Largest bag size minus one; an empty-bag decomposition has width -1.
    pub fn width(&self) -> Result<i64, TreedecError> {
        if self.bags.is_empty() {
            return Err(TreedecError::Empty);
        }
        Ok(self.bags.iter().map(|b| b.len() as i64).max().unwrap() - 1)
    }

    /// Checks the three decomposition conditions against `graph`, plus basic
    /// structural sanity, and reports every violation found.
    pub fn validate(&self, graph: &Graph) -> ValidationReport {
        let mut violations = Vec::new();
        let n = self.bags.len();
        if n == 0 {
            return ValidationReport {
                violations: vec![Violation::NotATree],
            };
        }
        // a tree: connected with exactly n-1 edges
        if self.edges.len() != n - 1 || self.component_of(0).len() != n {
            violations.push(Violation::NotATree);
        }
        for (node, bag) in self.bags() {
            for &v in bag {
                if v == 0 || v as usize > graph.num_vertices() {
                    violations.push(Violation::BagOutOfRange { node, vertex: v });
                }
            }
        }
        let mut containing: Vec<Vec<usize>> = vec![Vec::new(); graph.num_vertices() + 1];
        for (node, bag) in self.bags() {
            for &v in bag {
                if v as usize <= graph.num_vertices() {
                    containing[v as usize].push(node);
                }
            }
        }
        for v in graph.vertices() {
            if containing[v as usize].is_empty() {
                violations.push(Violation::VertexNotCovered { vertex: v });
            }
        }
        for (u, v) in graph.edges() {
            let covered = containing[u as usize]
                .iter()
                .any(|&node| self.bags[node].binary_search(&v).is_ok());
            if !covered {
                violations.push(Violation::EdgeNotCovered { u, v });
            }
        }
        for v in graph.vertices() {
            let nodes = &containing[v as usize];
            if nodes.len() <= 1 {
                continue;
            }
            // BFS restricted to bags holding v
            let inside: std::collections::BTreeSet<usize> = nodes.iter().copied().collect();
            let mut seen = std::collections::BTreeSet::new();
            let mut queue = vec![nodes[0]];
            seen.insert(nodes[0]);
            while let Some(t) = queue.pop() {
                for &nb in &self.adj[t] {
                    if inside.contains(&nb) && seen.insert(nb) {
                        queue.push(nb);
                    }
                }
            }
            if let Some(&out) = nodes.iter().find(|t| !seen.contains(t)) {
                violations.push(Violation::VertexDisconnected {
                    vertex: v,
                    node_a: nodes[0],
                    node_b: out,
                });
            }
        }
        ValidationReport { violations }
    }

    fn component_of(&self, start: usize) -> Vec<usize> {
        let mut seen = vec![false; self.bags.len()];
        let mut queue = vec![start];
        seen[start] = true;
        let mut out = vec![start];
        while let Some(t) = queue.pop() {
            for &nb in &self.adj[t] {
                if !seen[nb] {
                    seen[nb] = true;
                    out.push(nb);
                    queue.push(nb);
                }
            }
        }
        out
    }

    /// Contracts every tree edge whose one bag is contained in the other.
    /// The result covers the same graph with the same width but with at most
    /// one node per "maximal" bag, which keeps later passes linear.
    pub fn simplify(&self) -> TreeDecomposition {
        let n = self.bags.len();
        if n == 0 {
            return self.clone();
        }
        // union-find over contracted nodes
        let mut rep: Vec<usize> = (0..n).collect();
        fn find(rep: &mut Vec<usize>, x: usize) -> usize {
            if rep[x] != x {
                let r = find(rep, rep[x]);
                rep[x] = r;
            }
            rep[x]
        }
        let bags = self.bags.clone();
        let mut changed = true;
        while changed {
            changed = false;
            for &(a, b) in &self.edges {
                let ra = find(&mut rep, a);
                let rb = find(&mut rep, b);
                if ra == rb {
                    continue;
                }
                let (sub, sup) = if bags[ra].iter().all(|v| bags[rb].binary_search(v).is_ok()) {
                    (ra, rb)
                } else if bags[rb].iter().all(|v| bags[ra].binary_search(v).is_ok()) {
                    (rb, ra)
                } else {
                    continue;
                };
                rep[sub] = sup;
                changed = true;
            }
        }
        let mut remap = vec![usize::MAX; n];
        let mut out = TreeDecomposition::new(self.num_vertices);
        for i in 0..n {
            let r = find(&mut rep, i);
            if remap[r] == usize::MAX {
                remap[r] = out.add_bag(bags[r].clone());
            }
        }
        let mut added = std::collections::BTreeSet::new();
        for &(a, b) in &self.edges {
            let ra = remap[find(&mut rep, a)];
            let rb = remap[find(&mut rep, b)];
            if ra != rb && added.insert((ra.min(rb), ra.max(rb))) {
                out.add_edge(ra, rb);
            }
        }
        out
    }
}
