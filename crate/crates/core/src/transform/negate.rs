//! Complementing a formula's model set over its own variables.
//!
//! Plain clause-by-clause negation of a CNF formula is exponential, so the
//! construction here produces a 3-CNF formula over the original variables
//! plus helpers whose models, projected back, are exactly the assignments
//! the input rejects. One witness variable per clause records that the
//! clause is satisfied, a conjunction tree over a binarized copy of the
//! input decomposition aggregates the witnesses, and a single unit clause
//! denies the root. All helper clauses are placed either in rewritten input
//! bags or in small leaf bags hung off them, which bounds the output width
//! by `2k + 5` for input width `k`.

use super::ProjectionCertificate;
use crate::cnf::{incidence_clause_vertex, CnfFormula, Lit, Var};
use crate::treedec::TreeDecomposition;
use std::collections::BTreeSet;

/// Maximum output width for input width `k`.
pub fn negation_width_bound(k: i64) -> i64 {
    2 * k.max(0) + 5
}

struct BinNode {
    src: usize,
    children: Vec<usize>,
}

/// Roots the decomposition tree at node 0 and rewrites it so every node has
/// at most two children, inserting pass-through copies that reuse the same
/// source bag.
fn binarize(d: &TreeDecomposition) -> (Vec<BinNode>, usize) {
    let n = d.num_nodes();
    let mut seen = vec![false; n];
    let mut src_children: Vec<Vec<usize>> = vec![Vec::new(); n];
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
                src_children[t].push(nb);
                bfs.push(nb);
            }
        }
    }
    assert_eq!(bfs.len(), n, "decomposition tree must be connected");
    let mut nodes: Vec<BinNode> = (0..n)
        .map(|t| BinNode {
            src: t,
            children: Vec::new(),
        })
        .collect();
    for t in 0..n {
        let mut host = t;
        let mut rest: &[usize] = &src_children[t];
        while rest.len() > 2 {
            nodes.push(BinNode {
                src: t,
                children: Vec::new(),
            });
            let helper = nodes.len() - 1;
            nodes[host].children = vec![rest[0], helper];
            host = helper;
            rest = &rest[1..];
        }
        nodes[host].children = rest.to_vec();
    }
    (nodes, 0)
}

/// Builds the complement of `f` guided by a tree decomposition of `f`'s
/// incidence graph. The decomposition must be valid for that graph.
pub fn negate_projection(f: &CnfFormula, d: &TreeDecomposition) -> ProjectionCertificate {
    let n = f.num_vars();
    assert!(d.num_nodes() > 0, "decomposition has no nodes");
    let (bin, root) = binarize(d);

    let mut out = CnfFormula::new(n);
    // one satisfaction witness per input clause
    let witnesses: Vec<Var> = (0..f.num_clauses()).map(|_| out.fresh_var()).collect();
    // one aggregate per binarized node
    let agg: Vec<Var> = (0..bin.len()).map(|_| out.fresh_var()).collect();

    // where each input clause vertex and variable can be found
    let in_bag = |t: usize, vertex: u32| d.bag(bin[t].src).binary_search(&vertex).is_ok();
    let clause_vertex = |j: usize| incidence_clause_vertex(f, j);

    // Each clause aggregates at the first binarized node whose bag holds its
    // vertex; each witness clause hangs off a node where variable and clause
    // vertex meet.
    let mut content: Vec<Vec<usize>> = vec![Vec::new(); bin.len()];
    for j in 0..f.num_clauses() {
        let home = (0..bin.len())
            .find(|&t| in_bag(t, clause_vertex(j)))
            .expect("decomposition covers every clause vertex");
        content[home].push(j);
    }

    // output bags: variable sets per binarized node, plus hung leaves
    // collected as (attach-to, vars, clause id)
    let mut bag_vars: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); bin.len()];
    let mut leaves: Vec<(usize, Vec<u32>, usize)> = Vec::new();

    for (t, node) in bin.iter().enumerate() {
        for &vertex in d.bag(node.src) {
            if vertex <= n {
                bag_vars[t].insert(vertex);
            } else {
                let j = (vertex - n - 1) as usize;
                bag_vars[t].insert(witnesses[j].get());
            }
        }
        bag_vars[t].insert(agg[t].get());
        for &c in &node.children {
            bag_vars[t].insert(agg[c].get());
        }
    }

    // witness clauses: every satisfied literal certifies its clause
    for (j, clause) in f.clauses() {
        for &lit in &clause.literals {
            let id = out
                .add_clause(vec![lit.negated(), Lit::pos(witnesses[j])])
                .expect("witness clause is over distinct variables");
            let host = (0..bin.len())
                .find(|&t| in_bag(t, lit.var().get()) && in_bag(t, clause_vertex(j)))
                .expect("decomposition covers every incidence edge");
            leaves.push((host, vec![lit.var().get(), witnesses[j].get()], id));
        }
    }

    // aggregate clauses: a node is certified only if its children and its
    // clauses are; long ones are chained through fresh connectors in-bag
    for (t, node) in bin.iter().enumerate() {
        let mut parts: Vec<Lit> = vec![Lit::pos(agg[t])];
        parts.extend(node.children.iter().map(|&c| Lit::neg(agg[c])));
        parts.extend(content[t].iter().map(|&j| Lit::neg(witnesses[j])));
        while parts.len() > 3 {
            let a = parts.remove(0);
            let b = parts.remove(0);
            let z = out.fresh_var();
            bag_vars[t].insert(z.get());
            let id = out
                .add_clause(vec![a, b, Lit::pos(z)])
                .expect("chain link is over distinct variables");
            leaves.push((t, vec![a.var().get(), b.var().get(), z.get()], id));
            parts.insert(0, Lit::neg(z));
        }
        let id = out
            .add_clause(parts.clone())
            .expect("aggregate clause is over distinct variables");
        leaves.push((t, parts.iter().map(|l| l.var().get()).collect(), id));
    }

    // deny the root aggregate
    let root_id = out
        .add_clause(vec![Lit::neg(agg[root])])
        .expect("unit clause");
    leaves.push((root, vec![agg[root].get()], root_id));

    // materialize the output decomposition
    let out_n = out.num_vars();
    let mut dd = TreeDecomposition::new(out_n as usize + out.num_clauses());
    for vars in &bag_vars {
        dd.add_bag(vars.iter().copied().collect());
    }
    for (t, node) in bin.iter().enumerate() {
        for &c in &node.children {
            dd.add_edge(t, c);
        }
    }
    for (host, mut vars, clause_id) in leaves {
        vars.push(out_n + 1 + clause_id as u32);
        let leaf = dd.add_bag(vars);
        dd.add_edge(host, leaf);
    }

    let k = d.width().expect("input decomposition has nodes");
    let bound = negation_width_bound(k);
    let w = dd.width().unwrap();
    assert!(w <= bound, "complement width {w} exceeds the bound {bound}");

    ProjectionCertificate {
        source_vars: (1..=n).map(Var::new).collect(),
        target: out,
        decomposition: dd,
    }
}
