//! Conjunction of two formulas that live on the same decomposition tree.
//!
//! Both inputs come with tree decompositions of their incidence graphs over
//! a shared variable universe and a shared tree shape. The conjunction is
//! just clause-list concatenation; the interesting part is the combined
//! decomposition, which unions the two bags at every node and therefore has
//! width at most `width(d1) + width(d2) + 1`. That union is only a valid
//! decomposition when, wherever the bags overlap, the two formulas place
//! the same variables — the per-node compatibility check below.

use crate::cnf::{CnfFormula, Var};
use crate::treedec::TreeDecomposition;
use std::collections::BTreeSet;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConjoinError {
    #[error("formulas range over different variable universes ({left} vs {right})")]
    UniverseMismatch { left: u32, right: u32 },
    #[error("decompositions do not share one tree shape")]
    SkeletonMismatch,
    #[error("bags at node {node} overlap but place different variables")]
    SharedVarMisplaced { node: usize },
}

/// Conjoins `f1` and `f2` (equal `num_vars`, clause lists concatenated in
/// order) and merges their decompositions node by node. At every node the
/// two bags must either share no variable, or agree on which of their
/// formula's occurring variables they hold.
pub fn conjoin(
    f1: &CnfFormula,
    f2: &CnfFormula,
    d1: &TreeDecomposition,
    d2: &TreeDecomposition,
) -> Result<(CnfFormula, TreeDecomposition), ConjoinError> {
    let n = f1.num_vars();
    if f2.num_vars() != n {
        return Err(ConjoinError::UniverseMismatch {
            left: n,
            right: f2.num_vars(),
        });
    }
    if d1.num_nodes() != d2.num_nodes() {
        return Err(ConjoinError::SkeletonMismatch);
    }
    let canon = |d: &TreeDecomposition| -> BTreeSet<(usize, usize)> {
        d.tree_edges()
            .iter()
            .map(|&(a, b)| (a.min(b), a.max(b)))
            .collect()
    };
    if canon(d1) != canon(d2) {
        return Err(ConjoinError::SkeletonMismatch);
    }

    let occurring = |f: &CnfFormula| -> Vec<bool> {
        let mut occ = vec![false; n as usize + 1];
        for v in 1..=n {
            occ[v as usize] = f.var_occurrences(Var::new(v)).next().is_some();
        }
        occ
    };
    let occ1 = occurring(f1);
    let occ2 = occurring(f2);

    for t in 0..d1.num_nodes() {
        let vars = |d: &TreeDecomposition| -> Vec<u32> {
            d.bag(t).iter().copied().filter(|&v| v <= n).collect()
        };
        let v1 = vars(d1);
        let v2 = vars(d2);
        if v1.iter().all(|v| !v2.contains(v)) {
            continue;
        }
        let own1: Vec<u32> = v1.iter().copied().filter(|&v| occ1[v as usize]).collect();
        let own2: Vec<u32> = v2.iter().copied().filter(|&v| occ2[v as usize]).collect();
        if own1 != own2 {
            return Err(ConjoinError::SharedVarMisplaced { node: t });
        }
    }

    let mut g = CnfFormula::new(n);
    for f in [f1, f2] {
        for (_, c) in f.clauses() {
            g.add_clause(c.literals.clone())
                .expect("stored clauses are already canonical");
        }
        for c in f.comments() {
            g.push_comment(c.clone());
        }
    }

    let m1 = f1.num_clauses() as u32;
    let mut dd = TreeDecomposition::new(n as usize + g.num_clauses());
    for t in 0..d1.num_nodes() {
        let mut bag: Vec<u32> = d1.bag(t).to_vec();
        bag.extend(
            d2.bag(t)
                .iter()
                .map(|&v| if v <= n { v } else { v + m1 }),
        );
        dd.add_bag(bag);
    }
    for &(a, b) in d1.tree_edges() {
        dd.add_edge(a, b);
    }

    let w1 = d1.width().expect("left decomposition has nodes");
    let w2 = d2.width().expect("right decomposition has nodes");
    let w = dd.width().expect("combined decomposition has nodes");
    assert!(w <= w1 + w2 + 1, "union width {w} exceeds {w1} + {w2} + 1");
    Ok((g, dd))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnf::{incidence_graph, parse_dimacs, write_dimacs, Lit};
    use crate::treedec::{decompose, Strategy};

    fn empty_twin(d: &TreeDecomposition, num_vertices: usize) -> TreeDecomposition {
        let mut twin = TreeDecomposition::new(num_vertices);
        for _ in 0..d.num_nodes() {
            twin.add_bag(Vec::new());
        }
        for &(a, b) in d.tree_edges() {
            twin.add_edge(a, b);
        }
        twin
    }

    #[test]
    fn empty_right_operand_is_the_identity() {
        let f = parse_dimacs("p cnf 4 3\n1 -2 0\n2 3 4 0\n-1 -4 0\n").unwrap();
        let d = decompose(&incidence_graph(&f), Strategy::MinFill);
        let twin = empty_twin(&d, f.num_vars() as usize);
        let (g, dd) = conjoin(&f, &CnfFormula::new(4), &d, &twin).unwrap();
        assert_eq!(write_dimacs(&g, false), write_dimacs(&f, false));
        assert_eq!(dd, d);
    }

    #[test]
    fn variable_disjoint_formulas_concatenate() {
        let f1 = parse_dimacs("p cnf 4 1\n1 2 0\n").unwrap();
        let f2 = parse_dimacs("p cnf 4 1\n-3 4 0\n").unwrap();
        let mut d1 = TreeDecomposition::new(4 + 1);
        let a = d1.add_bag(vec![1, 2, 3, 4, 5]);
        let b = d1.add_bag(Vec::new());
        d1.add_edge(a, b);
        let mut d2 = TreeDecomposition::new(4 + 1);
        let a2 = d2.add_bag(Vec::new());
        let b2 = d2.add_bag(vec![3, 4, 5]);
        d2.add_edge(a2, b2);
        let (g, dd) = conjoin(&f1, &f2, &d1, &d2).unwrap();
        assert_eq!(g.num_clauses(), 2);
        assert!(dd.validate(&incidence_graph(&g)).is_ok());
        assert!(dd.width().unwrap() <= d1.width().unwrap() + d2.width().unwrap() + 1);
        for mask in 0..16u32 {
            let asg: Vec<bool> = (0..4).map(|i| mask >> i & 1 == 1).collect();
            assert_eq!(g.evaluate(&asg), f1.evaluate(&asg) && f2.evaluate(&asg));
        }
    }

    #[test]
    fn overlapping_bags_must_place_the_same_variables() {
        let f1 = parse_dimacs("p cnf 3 1\n1 2 0\n").unwrap();
        let f2 = parse_dimacs("p cnf 3 1\n1 3 0\n").unwrap();
        let mut d1 = TreeDecomposition::new(3 + 1);
        d1.add_bag(vec![1, 2, 3, 4]);
        let mut d2 = TreeDecomposition::new(3 + 1);
        d2.add_bag(vec![1, 3, 4]);
        assert_eq!(
            conjoin(&f1, &f2, &d1, &d2),
            Err(ConjoinError::SharedVarMisplaced { node: 0 })
        );
    }

    #[test]
    fn shape_and_universe_mismatches_are_rejected() {
        let f = parse_dimacs("p cnf 2 1\n1 2 0\n").unwrap();
        let d = decompose(&incidence_graph(&f), Strategy::MinFill);
        let smaller = parse_dimacs("p cnf 1 1\n1 0\n").unwrap();
        assert_eq!(
            conjoin(&f, &smaller, &d, &d),
            Err(ConjoinError::UniverseMismatch { left: 2, right: 1 })
        );
        let mut extra = d.clone();
        let leaf = extra.add_bag(Vec::new());
        extra.add_edge(0, leaf);
        assert_eq!(
            conjoin(&f, &CnfFormula::new(2), &d, &extra),
            Err(ConjoinError::SkeletonMismatch)
        );
        let mut path = TreeDecomposition::new(2);
        let p0 = path.add_bag(vec![1, 2]);
        let p1 = path.add_bag(vec![1]);
        let p2 = path.add_bag(vec![1]);
        path.add_edge(p0, p1);
        path.add_edge(p1, p2);
        let mut star = TreeDecomposition::new(2);
        let s0 = star.add_bag(vec![1, 2]);
        let s1 = star.add_bag(vec![1]);
        let s2 = star.add_bag(vec![1]);
        star.add_edge(s0, s1);
        star.add_edge(s0, s2);
        assert_eq!(
            conjoin(&f, &CnfFormula::new(2), &path, &star),
            Err(ConjoinError::SkeletonMismatch)
        );
    }

    #[test]
    fn flipped_copies_on_one_tree_agree_with_direct_evaluation() {
        let mut state = 0x1234987u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for _ in 0..80 {
            let n = 2 + (next() % 4) as u32;
            let m = 1 + next() % 5;
            let mut f1 = CnfFormula::new(n);
            for _ in 0..m {
                let len = 1 + next() % 3;
                let lits: Vec<Lit> = (0..len)
                    .map(|_| {
                        let v = Var::new(1 + (next() % n as u64) as u32);
                        Lit::new(v, next() % 2 == 0)
                    })
                    .collect();
                let _ = f1.add_clause(lits);
            }
            let mut f2 = CnfFormula::new(n);
            for (_, c) in f1.clauses() {
                let flipped: Vec<Lit> = c.literals.iter().map(|l| l.negated()).collect();
                f2.add_clause(flipped).unwrap();
            }
            let d = decompose(&incidence_graph(&f1), Strategy::MinFill);
            let (g, dd) = conjoin(&f1, &f2, &d, &d).unwrap();
            assert!(dd.validate(&incidence_graph(&g)).is_ok());
            for mask in 0..1u32 << n {
                let asg: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
                assert_eq!(g.evaluate(&asg), f1.evaluate(&asg) && f2.evaluate(&asg));
            }
        }
    }
}
