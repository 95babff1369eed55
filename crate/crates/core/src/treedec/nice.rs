//! Normalization of a tree decomposition into the four-kind "nice" form that
//! the dynamic-programming passes walk: empty-bag leaves, unary introduce and
//! forget steps, and binary joins, rooted at an empty bag so that every
//! vertex is forgotten on exactly one edge of the tree.

use super::TreeDecomposition;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NiceNodeKind {
    /// No children, empty bag.
    Leaf,
    /// One child; this bag is the child's bag plus the named vertex.
    Introduce(u32),
    /// One child; this bag is the child's bag minus the named vertex.
    Forget(u32),
    /// Two children, all three bags equal.
    Join,
}

#[derive(Debug, Clone)]
pub struct NiceNode {
    pub kind: NiceNodeKind,
    pub bag: Vec<u32>,
    pub children: Vec<usize>,
    pub parent: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct NiceTreeDecomposition {
    nodes: Vec<NiceNode>,
    root: usize,
}

impl NiceTreeDecomposition {
    pub fn nodes(&self) -> &[NiceNode] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> &NiceNode {
        &self.nodes[id]
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn width(&self) -> i64 {
        self.nodes
            .iter()
            .map(|n| n.bag.len() as i64)
            .max()
            .expect("a nice decomposition always has nodes")
            - 1
    }

    /// Node ids in an order where children precede their parents; the root
    /// comes last. This is the evaluation order of every pass over the tree.
    pub fn postorder(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![(self.root, false)];
        while let Some((id, expanded)) = stack.pop() {
            if expanded {
                out.push(id);
            } else {
                stack.push((id, true));
                for &c in self.nodes[id].children.iter().rev() {
                    stack.push((c, false));
                }
            }
        }
        out
    }

    /// Flattens back into the plain representation (for validation against
    /// the original graph, or for writing out).
    pub fn to_tree_decomposition(&self, num_vertices: usize) -> TreeDecomposition {
        let mut d = TreeDecomposition::new(num_vertices);
        for node in &self.nodes {
            d.add_bag(node.bag.clone());
        }
        for (id, node) in self.nodes.iter().enumerate() {
            for &c in &node.children {
                d.add_edge(id, c);
            }
        }
        d
    }

    /// Checks the structural promises of the four node kinds, that the root
    /// bag is empty, and that no vertex is forgotten twice. Panics with a
    /// description on the first breach.
    pub fn assert_well_formed(&self) {
        assert!(
            self.nodes[self.root].bag.is_empty(),
            "root bag must be empty"
        );
        assert!(self.nodes[self.root].parent.is_none());
        let mut forgotten = std::collections::BTreeSet::new();
        for (id, node) in self.nodes.iter().enumerate() {
            for &c in &node.children {
                assert_eq!(self.nodes[c].parent, Some(id));
            }
            match node.kind {
                NiceNodeKind::Leaf => {
                    assert!(node.children.is_empty() && node.bag.is_empty());
                }
                NiceNodeKind::Introduce(v) => {
                    assert_eq!(node.children.len(), 1);
                    let child = &self.nodes[node.children[0]];
                    let mut expect = child.bag.clone();
                    expect.push(v);
                    expect.sort_unstable();
                    assert!(!child.bag.contains(&v));
                    assert_eq!(node.bag, expect);
                }
                NiceNodeKind::Forget(v) => {
                    assert_eq!(node.children.len(), 1);
                    let child = &self.nodes[node.children[0]];
                    let expect: Vec<u32> =
                        child.bag.iter().copied().filter(|&u| u != v).collect();
                    assert!(child.bag.contains(&v));
                    assert_eq!(node.bag, expect);
                    assert!(forgotten.insert(v), "vertex {v} forgotten twice");
                }
                NiceNodeKind::Join => {
                    assert_eq!(node.children.len(), 2);
                    for &c in &node.children {
                        assert_eq!(self.nodes[c].bag, node.bag);
                    }
                }
            }
        }
    }
}

fn push(
    nodes: &mut Vec<NiceNode>,
    kind: NiceNodeKind,
    bag: Vec<u32>,
    children: Vec<usize>,
) -> usize {
    nodes.push(NiceNode {
        kind,
        bag,
        children,
        parent: None,
    });
    nodes.len() - 1
}

/// Grows a chain on top of `top` (whose bag is `from`) that forgets
/// everything in `from` but not `to`, then introduces everything in `to` but
/// not `from`, both in ascending vertex order. Returns the new top, bag `to`.
fn transition(nodes: &mut Vec<NiceNode>, mut top: usize, from: &[u32], to: &[u32]) -> usize {
    let mut bag: Vec<u32> = from.to_vec();
    for &v in from.iter().filter(|v| to.binary_search(v).is_err()) {
        bag.retain(|&u| u != v);
        top = push(nodes, NiceNodeKind::Forget(v), bag.clone(), vec![top]);
    }
    for &v in to.iter().filter(|v| from.binary_search(v).is_err()) {
        let pos = bag.binary_search(&v).unwrap_err();
        bag.insert(pos, v);
        top = push(nodes, NiceNodeKind::Introduce(v), bag.clone(), vec![top]);
    }
    top
}

/// Converts any tree decomposition into nice form, rooted at an empty bag.
/// The shape of the input tree is preserved up to the inserted unary chains;
/// the node count stays within a constant factor of (vertex count + input
/// node count) times (width + 2).
pub fn make_nice(d: &TreeDecomposition) -> NiceTreeDecomposition {
    assert!(d.num_nodes() > 0, "cannot normalize an empty decomposition");
    let n = d.num_nodes();
    // Orient the tree away from node 0 with a breadth-first sweep.
    let mut seen = vec![false; n];
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut bfs = vec![0usize];
    seen[0] = true;
    let mut i = 0;
    while i < bfs.len() {
        let t = bfs[i];
        i += 1;
        let mut nbs: Vec<usize> = d.neighbors(t).to_vec();
        nbs.sort_unstable();
        for nb in nbs {
            if !seen[nb] {
                seen[nb] = true;
                children[t].push(nb);
                bfs.push(nb);
            }
        }
    }
    assert_eq!(bfs.len(), n, "decomposition tree must be connected");

    let mut nodes: Vec<NiceNode> = Vec::new();
    let mut top = vec![usize::MAX; n];
    for &t in bfs.iter().rev() {
        let bt = d.bag(t);
        let mut acc = usize::MAX;
        for &c in &children[t] {
            let lifted = transition(&mut nodes, top[c], d.bag(c), bt);
            acc = if acc == usize::MAX {
                lifted
            } else {
                push(&mut nodes, NiceNodeKind::Join, bt.to_vec(), vec![acc, lifted])
            };
        }
        if acc == usize::MAX {
            let leaf = push(&mut nodes, NiceNodeKind::Leaf, Vec::new(), Vec::new());
            acc = transition(&mut nodes, leaf, &[], bt);
        }
        top[t] = acc;
    }
    let root = transition(&mut nodes, top[0], d.bag(0), &[]);
    for id in 0..nodes.len() {
        for ci in 0..nodes[id].children.len() {
            let c = nodes[id].children[ci];
            nodes[c].parent = Some(id);
        }
    }
    NiceTreeDecomposition { nodes, root }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::treedec::{decompose, Strategy};

    #[test]
    fn single_empty_bag() {
        let mut d = TreeDecomposition::new(0);
        d.add_bag(vec![]);
        let nice = make_nice(&d);
        nice.assert_well_formed();
        assert_eq!(nice.num_nodes(), 1);
        assert!(matches!(nice.node(nice.root()).kind, NiceNodeKind::Leaf));
    }

    #[test]
    fn path_becomes_nice_and_stays_valid() {
        let g = Graph::from_edges(4, vec![(1, 2), (2, 3), (3, 4)]);
        let d = decompose(&g, Strategy::MinFill);
        let nice = make_nice(&d);
        nice.assert_well_formed();
        assert_eq!(nice.width(), d.width().unwrap());
        let back = nice.to_tree_decomposition(4);
        assert!(back.validate(&g).is_ok());
    }

    #[test]
    fn joins_appear_for_branching_trees() {
        let mut d = TreeDecomposition::new(4);
        let hub = d.add_bag(vec![1]);
        for v in 2..=4 {
            let leaf = d.add_bag(vec![1, v]);
            d.add_edge(hub, leaf);
        }
        let nice = make_nice(&d);
        nice.assert_well_formed();
        let joins = nice
            .nodes()
            .iter()
            .filter(|n| matches!(n.kind, NiceNodeKind::Join))
            .count();
        assert_eq!(joins, 2);
        let g = Graph::from_edges(4, vec![(1, 2), (1, 3), (1, 4)]);
        assert!(nice.to_tree_decomposition(4).validate(&g).is_ok());
    }

    #[test]
    fn node_count_stays_linear() {
        // width+2 times (vertices + input nodes), times a small constant
        for n in [5usize, 20, 60] {
            let g = Graph::from_edges(n, (1..n as u32).map(|i| (i, i + 1)));
            let d = decompose(&g, Strategy::MinDegree);
            let nice = make_nice(&d);
            nice.assert_well_formed();
            let bound = 3 * (n + d.num_nodes()) * (nice.width() as usize + 2);
            assert!(
                nice.num_nodes() <= bound,
                "{} nice nodes exceeds bound {}",
                nice.num_nodes(),
                bound
            );
        }
    }

    #[test]
    fn postorder_visits_children_first() {
        let g = Graph::from_edges(6, vec![(1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 1)]);
        let nice = make_nice(&decompose(&g, Strategy::MinFill));
        let order = nice.postorder();
        assert_eq!(order.len(), nice.num_nodes());
        let mut pos = vec![0; order.len()];
        for (i, &id) in order.iter().enumerate() {
            pos[id] = i;
        }
        for (id, node) in nice.nodes().iter().enumerate() {
            for &c in &node.children {
                assert!(pos[c] < pos[id]);
            }
        }
        assert_eq!(*order.last().unwrap(), nice.root());
    }

    #[test]
    fn every_covered_vertex_forgotten_once() {
        let g = Graph::from_edges(5, vec![(1, 2), (1, 3), (2, 3), (3, 4), (4, 5)]);
        let nice = make_nice(&decompose(&g, Strategy::MinFill));
        nice.assert_well_formed();
        let forgotten: Vec<u32> = nice
            .nodes()
            .iter()
            .filter_map(|n| match n.kind {
                NiceNodeKind::Forget(v) => Some(v),
                _ => None,
            })
            .collect();
        let mut sorted = forgotten.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), forgotten.len());
        assert_eq!(sorted, vec![1, 2, 3, 4, 5]);
    }
}
