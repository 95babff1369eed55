//! Width-preserving reduction to clauses of at most three literals.
//!
//! The rewrite walks a nice tree decomposition of the input formula's
//! incidence graph. Every clause longer than three literals is split into a
//! chain of three-literal links with fresh connector variables; the order in
//! which a clause's literals enter its chain follows the order in which the
//! decomposition forgets them, so every emitted link fits inside one bag and
//! the output decomposition (same tree, rewritten bags) stays within a
//! constant multiple of the input width.

use super::ProjectionCertificate;
use crate::cnf::{CnfFormula, Lit, Var};
use crate::treedec::{NiceNodeKind, NiceTreeDecomposition, TreeDecomposition};
use std::collections::{BTreeMap, BTreeSet};

/// Maximum output width, as a function of the input width `k`. Chain
/// connectors, stashed literals, and link clauses each add at most one entry
/// per bag element, which keeps the blow-up linear in `k`.
pub fn arity_reduction_width_bound(k: i64) -> i64 {
    6 * k.max(0) + 10
}

struct Emitter {
    out: CnfFormula,
    /// Variables per output bag (indexed by nice node id).
    out_vars: Vec<BTreeSet<u32>>,
    /// Output clause ids per output bag.
    out_clauses_at: Vec<BTreeSet<usize>>,
}

impl Emitter {
    fn place(&mut self, node: usize, clause_id: usize, lits: &[Lit]) {
        self.out_clauses_at[node].insert(clause_id);
        for l in lits {
            self.out_vars[node].insert(l.var().get());
        }
    }

    /// One chain link `(prev ∨ lit ∨ z)` with a fresh connector `z`, placed
    /// in the bag of `node`; the chain continues through `¬z`.
    fn step(&mut self, prev: Option<Lit>, lit: Lit, node: usize) -> Lit {
        let z = self.out.fresh_var();
        self.out.push_comment(format!("x{} chains a split clause", z.get()));
        let mut lits: Vec<Lit> = prev.into_iter().collect();
        lits.push(lit);
        lits.push(Lit::pos(z));
        let id = self
            .out
            .add_clause(lits.clone())
            .expect("chain link literals are over distinct variables");
        self.place(node, id, &lits);
        Lit::neg(z)
    }

    /// Ends a chain by asserting the remaining parts as clauses of at most
    /// three literals, all placed in the bag of `node`.
    fn close(&mut self, prev: Option<Lit>, flush: Vec<Lit>, node: usize) {
        let mut parts: Vec<Lit> = prev.into_iter().chain(flush).collect();
        assert!(
            !parts.is_empty(),
            "a split clause always has a pending literal or an in-bag literal"
        );
        while parts.len() > 3 {
            let a = parts.remove(0);
            let b = parts.remove(0);
            let cont = self.step(Some(a), b, node);
            parts.insert(0, cont);
        }
        let id = self
            .out
            .add_clause(parts.clone())
            .expect("closing clause literals are over distinct variables");
        self.place(node, id, &parts);
    }
}

/// Rewrites `f` into 3-CNF, guided by a nice decomposition of `f`'s
/// incidence graph. See the module docs; clauses that already have at most
/// three literals are copied verbatim, in input order, ahead of the split
/// output.
pub fn to_3cnf(f: &CnfFormula, nice: &NiceTreeDecomposition) -> ProjectionCertificate {
    let n = f.num_vars();
    let nn = nice.num_nodes();
    let clause_lits: Vec<BTreeMap<u32, Lit>> = f
        .clauses()
        .map(|(_, c)| c.literals.iter().map(|&l| (l.var().get(), l)).collect())
        .collect();
    let is_long = |j: usize| f.clause(j).literals.len() > 3;

    let mut emitter = Emitter {
        out: CnfFormula::new(n),
        out_vars: vec![BTreeSet::new(); nn],
        out_clauses_at: vec![BTreeSet::new(); nn],
    };

    let mut short_out_id = vec![usize::MAX; f.num_clauses()];
    for (j, c) in f.clauses() {
        if !is_long(j) {
            short_out_id[j] = emitter
                .out
                .add_clause(c.literals.clone())
                .expect("input clause is well-formed");
        }
    }

    // Seed output bags: variables stay where they were; short clauses keep
    // the placement of their input incidence vertex.
    for (t, node) in nice.nodes().iter().enumerate() {
        for &v in &node.bag {
            if v <= n {
                emitter.out_vars[t].insert(v);
            } else {
                let j = (v - n - 1) as usize;
                if !is_long(j) {
                    emitter.out_clauses_at[t].insert(short_out_id[j]);
                }
            }
        }
    }

    // Per-subtree chain state: for each long clause still in the bag, the
    // pending literal that stands for "some already-collected literal of the
    // clause is true" (None until the subtree first meets one).
    let mut states: Vec<Option<BTreeMap<usize, Option<Lit>>>> = vec![None; nn];
    for &t in &nice.postorder() {
        let node = nice.node(t);
        let state = match node.kind {
            NiceNodeKind::Leaf => BTreeMap::new(),
            NiceNodeKind::Introduce(v) => {
                let mut s = states[node.children[0]].take().unwrap();
                if v > n {
                    let j = (v - n - 1) as usize;
                    if is_long(j) {
                        s.insert(j, None);
                    }
                }
                s
            }
            NiceNodeKind::Forget(v) => {
                let child = node.children[0];
                let mut s = states[child].take().unwrap();
                if v <= n {
                    let affected: Vec<usize> = s
                        .keys()
                        .copied()
                        .filter(|&j| clause_lits[j].contains_key(&v))
                        .collect();
                    for j in affected {
                        let lit = clause_lits[j][&v];
                        let next = match s[&j] {
                            None => lit,
                            Some(p) => emitter.step(Some(p), lit, child),
                        };
                        s.insert(j, Some(next));
                    }
                } else {
                    let j = (v - n - 1) as usize;
                    if is_long(j) {
                        let pending = s.remove(&j).unwrap();
                        let flush: Vec<Lit> = nice
                            .node(child)
                            .bag
                            .iter()
                            .filter(|&&u| u <= n)
                            .filter_map(|u| clause_lits[j].get(u).copied())
                            .collect();
                        emitter.close(pending, flush, child);
                    }
                }
                s
            }
            NiceNodeKind::Join => {
                let (c1, c2) = (node.children[0], node.children[1]);
                let s1 = states[c1].take().unwrap();
                let mut s2 = states[c2].take().unwrap();
                debug_assert!(s1.keys().eq(s2.keys()));
                let mut s = BTreeMap::new();
                for (j, p1) in s1 {
                    let p2 = s2.remove(&j).flatten();
                    let merged = match (p1, p2) {
                        (None, None) => None,
                        (Some(p), None) | (None, Some(p)) => Some(p),
                        (Some(p), Some(q)) => Some(emitter.step(Some(p), q, t)),
                    };
                    s.insert(j, merged);
                }
                s
            }
        };
        for pending in state.values().flatten() {
            emitter.out_vars[t].insert(pending.var().get());
        }
        states[t] = Some(state);
    }
    debug_assert!(states[nice.root()].as_ref().unwrap().is_empty());

    let out_n = emitter.out.num_vars();
    let mut d = TreeDecomposition::new(out_n as usize + emitter.out.num_clauses());
    for t in 0..nn {
        let mut bag: Vec<u32> = emitter.out_vars[t].iter().copied().collect();
        bag.extend(emitter.out_clauses_at[t].iter().map(|&j| out_n + 1 + j as u32));
        d.add_bag(bag);
    }
    for (t, node) in nice.nodes().iter().enumerate() {
        for &c in &node.children {
            d.add_edge(t, c);
        }
    }

    let bound = arity_reduction_width_bound(nice.width());
    let w = d.width().expect("output decomposition has nodes");
    assert!(w <= bound, "output width {w} exceeds the bound {bound}");

    ProjectionCertificate {
        source_vars: (1..=n).map(Var::new).collect(),
        target: emitter.out,
        decomposition: d,
    }
}
