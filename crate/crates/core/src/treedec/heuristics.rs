//! Decomposition construction: greedy elimination heuristics and an exact
//! branch-and-bound search for small graphs.

use super::{TreeDecomposition, TreedecError};
use crate::graph::Graph;
use std::collections::BTreeSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Eliminate the vertex whose neighborhood needs the fewest fill edges.
    MinFill,
    /// Eliminate the vertex of minimum current degree.
    MinDegree,
}

/// Builds a tree decomposition of `graph` with the given greedy strategy.
/// Always succeeds; the zero-vertex graph yields a single empty bag.
pub fn decompose(graph: &Graph, strategy: Strategy) -> TreeDecomposition {
    let order = eliminate_greedy(graph, strategy);
    from_elimination_order(graph, &order)
}

/// Exhaustive branch-and-bound over elimination orders. Returns a
/// decomposition of minimum width, or an error when the graph exceeds `cap`
/// vertices (the search is exponential).
pub fn exact_small(graph: &Graph, cap: usize) -> Result<TreeDecomposition, TreedecError> {
    let n = graph.num_vertices();
    if n > cap {
        return Err(TreedecError::TooLarge { vertices: n, cap });
    }
    if n == 0 {
        let mut d = TreeDecomposition::new(0);
        d.add_bag(vec![]);
        return Ok(d);
    }
    // Greedy result seeds the upper bound.
    let seed = eliminate_greedy(graph, Strategy::MinFill);
    let mut best_width = width_of_order(graph, &seed);
    let mut best_order = seed;

    let mut adj: Vec<BTreeSet<u32>> = adjacency_sets(graph);
    let mut alive: BTreeSet<u32> = graph.vertices().collect();
    let mut prefix = Vec::with_capacity(n);
    branch(
        &mut adj,
        &mut alive,
        &mut prefix,
        0,
        &mut best_width,
        &mut best_order,
    );
    Ok(from_elimination_order(graph, &best_order))
}

fn branch(
    adj: &mut Vec<BTreeSet<u32>>,
    alive: &mut BTreeSet<u32>,
    prefix: &mut Vec<u32>,
    max_so_far: usize,
    best_width: &mut usize,
    best_order: &mut Vec<u32>,
) {
    if max_so_far >= *best_width {
        return; // cannot improve on the incumbent
    }
    if alive.is_empty() {
        *best_width = max_so_far;
        *best_order = prefix.clone();
        return;
    }
    // If some vertex's neighborhood is already a clique, eliminating it first
    // is never worse than any other order, so commit to it without branching.
    let candidates: Vec<u32> = alive.iter().copied().collect();
    if let Some(&v) = candidates
        .iter()
        .find(|&&v| fill_needed(adj, v) == 0 && adj[v as usize - 1].len() < *best_width)
    {
        let undo = eliminate(adj, alive, v);
        prefix.push(v);
        let deg = undo.degree;
        branch(adj, alive, prefix, max_so_far.max(deg), best_width, best_order);
        prefix.pop();
        restore(adj, alive, v, undo);
        return;
    }
    for v in candidates {
        let deg = adj[v as usize - 1].len();
        if deg >= *best_width {
            continue;
        }
        let undo = eliminate(adj, alive, v);
        prefix.push(v);
        branch(adj, alive, prefix, max_so_far.max(deg), best_width, best_order);
        prefix.pop();
        restore(adj, alive, v, undo);
    }
}

struct Undo {
    degree: usize,
    neighbors: Vec<u32>,
    added_edges: Vec<(u32, u32)>,
}

fn eliminate(adj: &mut Vec<BTreeSet<u32>>, alive: &mut BTreeSet<u32>, v: u32) -> Undo {
    let neighbors: Vec<u32> = adj[v as usize - 1].iter().copied().collect();
    let mut added_edges = Vec::new();
    for i in 0..neighbors.len() {
        for j in i + 1..neighbors.len() {
            let (a, b) = (neighbors[i], neighbors[j]);
            if adj[a as usize - 1].insert(b) {
                adj[b as usize - 1].insert(a);
                added_edges.push((a, b));
            }
        }
    }
    for &u in &neighbors {
        adj[u as usize - 1].remove(&v);
    }
    alive.remove(&v);
    Undo {
        degree: neighbors.len(),
        neighbors,
        added_edges,
    }
}

fn restore(adj: &mut Vec<BTreeSet<u32>>, alive: &mut BTreeSet<u32>, v: u32, undo: Undo) {
    alive.insert(v);
    for &u in &undo.neighbors {
        adj[u as usize - 1].insert(v);
    }
    for (a, b) in undo.added_edges {
        adj[a as usize - 1].remove(&b);
        adj[b as usize - 1].remove(&a);
    }
}

fn adjacency_sets(graph: &Graph) -> Vec<BTreeSet<u32>> {
    graph
        .vertices()
        .map(|v| graph.neighbors(v).iter().copied().collect())
        .collect()
}

fn fill_needed(adj: &[BTreeSet<u32>], v: u32) -> usize {
    let nb: Vec<u32> = adj[v as usize - 1].iter().copied().collect();
    let mut missing = 0;
    for i in 0..nb.len() {
        for j in i + 1..nb.len() {
            if !adj[nb[i] as usize - 1].contains(&nb[j]) {
                missing += 1;
            }
        }
    }
    missing
}

fn eliminate_greedy(graph: &Graph, strategy: Strategy) -> Vec<u32> {
    let mut adj = adjacency_sets(graph);
    let mut alive: BTreeSet<u32> = graph.vertices().collect();
    let mut order = Vec::with_capacity(graph.num_vertices());
    while !alive.is_empty() {
        // Ties break toward the lowest vertex id, which makes every
        // construction downstream of this one deterministic.
        let v = match strategy {
            Strategy::MinDegree => alive
                .iter()
                .copied()
                .min_by_key(|&v| (adj[v as usize - 1].len(), v))
                .unwrap(),
            Strategy::MinFill => alive
                .iter()
                .copied()
                .min_by_key(|&v| (fill_needed(&adj, v), v))
                .unwrap(),
        };
        eliminate(&mut adj, &mut alive, v);
        order.push(v);
    }
    order
}

fn width_of_order(graph: &Graph, order: &[u32]) -> usize {
    let mut adj = adjacency_sets(graph);
    let mut alive: BTreeSet<u32> = graph.vertices().collect();
    let mut width = 0;
    for &v in order {
        width = width.max(adj[v as usize - 1].len());
        eliminate(&mut adj, &mut alive, v);
    }
    width
}

/// Standard bag construction from an elimination order: the bag of `v` is
/// `v` plus its neighborhood in the fill graph at the moment `v` is
/// eliminated, and it hangs off the bag of the earliest-eliminated such
/// neighbor. Roots of separate components are chained afterwards so the
/// result is one tree.
fn from_elimination_order(graph: &Graph, order: &[u32]) -> TreeDecomposition {
    let n = graph.num_vertices();
    let mut d = TreeDecomposition::new(n);
    if n == 0 {
        d.add_bag(vec![]);
        return d;
    }
    let mut adj = adjacency_sets(graph);
    let mut alive: BTreeSet<u32> = graph.vertices().collect();
    let mut position = vec![0usize; n + 1];
    for (i, &v) in order.iter().enumerate() {
        position[v as usize] = i;
    }
    let mut node_of = vec![usize::MAX; n + 1];
    let mut roots = Vec::new();
    let mut parents: Vec<(u32, u32)> = Vec::new();
    for &v in order {
        let mut bag: Vec<u32> = adj[v as usize - 1].iter().copied().collect();
        let parent = bag.iter().copied().min_by_key(|&u| position[u as usize]);
        bag.push(v);
        let id = d.add_bag(bag);
        node_of[v as usize] = id;
        match parent {
            Some(u) => parents.push((v, u)),
            None => roots.push(id),
        }
        eliminate(&mut adj, &mut alive, v);
    }
    for (v, u) in parents {
        d.add_edge(node_of[v as usize], node_of[u as usize]);
    }
    for pair in roots.windows(2) {
        d.add_edge(pair[0], pair[1]);
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    /// All graphs on up to `n` labeled vertices, by edge bitmask.
    fn all_graphs(n: usize) -> Vec<Graph> {
        let pairs: Vec<(u32, u32)> = (1..=n as u32)
            .flat_map(|u| (u + 1..=n as u32).map(move |v| (u, v)))
            .collect();
        (0u32..1 << pairs.len())
            .map(|mask| {
                Graph::from_edges(
                    n,
                    pairs
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| mask >> i & 1 == 1)
                        .map(|(_, &e)| e),
                )
            })
            .collect()
    }

    #[test]
    fn heuristics_and_exact_agree_on_validity() {
        for n in 0..=4 {
            for g in all_graphs(n) {
                for strategy in [Strategy::MinFill, Strategy::MinDegree] {
                    let d = decompose(&g, strategy);
                    let report = d.validate(&g);
                    assert!(report.is_ok(), "{:?} on {:?}: {:?}", strategy, g, report);
                }
                let d = exact_small(&g, 20).unwrap();
                assert!(d.validate(&g).is_ok());
            }
        }
    }

    #[test]
    fn exact_is_never_beaten_by_heuristics() {
        for g in all_graphs(4) {
            let opt = exact_small(&g, 20).unwrap().width().unwrap();
            for strategy in [Strategy::MinFill, Strategy::MinDegree] {
                let w = decompose(&g, strategy).width().unwrap();
                assert!(w >= opt);
            }
        }
    }

    #[test]
    fn known_widths() {
        // path: width 1
        let path = Graph::from_edges(5, (1..5).map(|i| (i, i + 1)));
        assert_eq!(exact_small(&path, 20).unwrap().width().unwrap(), 1);
        // cycle: width 2
        let cycle = Graph::from_edges(5, (1..5).map(|i| (i, i + 1)).chain([(5, 1)]));
        assert_eq!(exact_small(&cycle, 20).unwrap().width().unwrap(), 2);
        // complete graph K5: width 4
        let k5 = Graph::from_edges(
            5,
            (1..=5u32).flat_map(|u| (u + 1..=5).map(move |v| (u, v))),
        );
        assert_eq!(exact_small(&k5, 20).unwrap().width().unwrap(), 4);
        // edgeless: width 0
        let e = Graph::new(3);
        assert_eq!(exact_small(&e, 20).unwrap().width().unwrap(), 0);
    }

    #[test]
    fn cap_is_enforced() {
        let g = Graph::new(25);
        assert_eq!(
            exact_small(&g, 20),
            Err(TreedecError::TooLarge {
                vertices: 25,
                cap: 20
            })
        );
    }

    #[test]
    fn disconnected_graph_yields_one_tree() {
        let g = Graph::from_edges(6, vec![(1, 2), (4, 5)]);
        for strategy in [Strategy::MinFill, Strategy::MinDegree] {
            let d = decompose(&g, strategy);
            assert!(d.validate(&g).is_ok());
        }
    }
}
