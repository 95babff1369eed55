//! Componentwise set inclusion between two variable blocks.
//!
//! Reading an assignment of `xs` and `ys` as a pair of sets (position `i` is
//! a member when the variable is true), [`subset_constraint`] produces a
//! formula whose models, restricted to the listed variables, are exactly the
//! inclusions — plain `X ⊆ Y` as the direct clauses `(¬xᵢ ∨ yᵢ)`, and strict
//! `X ⊂ Y` by complementing the componentwise-equality formula with
//! [`negate_projection`] and conjoining the inclusion clauses back on. All
//! new material lives in leaf bags of at most five vertices hung off the
//! carrier decomposition, or in carrier bags that grow by at most three
//! helper variables, which is where the width bound comes from.

use super::reify::Piece;
use super::{conjoin, negate_projection, ProjectionCertificate};
use crate::cnf::{CnfFormula, Lit, Var};
use crate::treedec::TreeDecomposition;
use std::collections::BTreeSet;

/// Which inclusion [`subset_constraint`] expresses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubsetMode {
    /// `X ⊆ Y`: membership in `X` implies membership in `Y`.
    Subseteq,
    /// `X ⊂ Y`: inclusion plus at least one position in `Y` only.
    Strict,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SubsetError {
    #[error("variable sequences have different lengths ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
    #[error("variable x{var} is outside the carrier decomposition's vertex range")]
    VarOutOfRange { var: u32 },
    #[error("variable x{var} appears in more than one position pair")]
    DuplicateVar { var: u32 },
    #[error("no carrier bag contains both variables of position {index}")]
    PairNotCovered { index: usize },
}

/// Maximum output width for carrier width `k`, either mode.
pub fn subset_width_bound(k: i64) -> i64 {
    k.max(0) + 4
}

/// Expresses `xs ⊆ ys` (or `xs ⊂ ys` in strict mode) over the carrier
/// decomposition `d`, whose vertices `1..=d.num_vertices()` are all read as
/// variables. Every position pair must share some carrier bag, and no
/// variable may serve two different positions; positions with `xs[i] ==
/// ys[i]` are inclusion-neutral and add nothing. The certificate's
/// decomposition keeps the carrier's tree as a subgraph and stays within
/// [`subset_width_bound`].
pub fn subset_constraint(
    xs: &[Var],
    ys: &[Var],
    mode: SubsetMode,
    d: &TreeDecomposition,
) -> Result<ProjectionCertificate, SubsetError> {
    if xs.len() != ys.len() {
        return Err(SubsetError::LengthMismatch {
            left: xs.len(),
            right: ys.len(),
        });
    }
    let universe = d.num_vertices() as u32;
    let mut seen: BTreeSet<u32> = BTreeSet::new();
    for i in 0..xs.len() {
        for v in [xs[i], ys[i]] {
            if v.get() == 0 || v.get() > universe {
                return Err(SubsetError::VarOutOfRange { var: v.get() });
            }
        }
        let pair: BTreeSet<u32> = [xs[i].get(), ys[i].get()].into();
        if pair.iter().any(|v| seen.contains(v)) {
            let v = *pair.iter().find(|v| seen.contains(v)).unwrap();
            return Err(SubsetError::DuplicateVar { var: v });
        }
        seen.extend(pair);
    }

    // positions that actually constrain anything, with a bag to live in
    let mut placed: Vec<(Var, Var, usize)> = Vec::new();
    for i in 0..xs.len() {
        if xs[i] == ys[i] {
            continue;
        }
        let host = (0..d.num_nodes())
            .find(|&t| {
                let bag = d.bag(t);
                bag.binary_search(&xs[i].get()).is_ok() && bag.binary_search(&ys[i].get()).is_ok()
            })
            .ok_or(SubsetError::PairNotCovered { index: i })?;
        placed.push((xs[i], ys[i], host));
    }

    let source_vars: Vec<Var> = seen.iter().map(|&v| Var::new(v)).collect();

    let cert = match mode {
        SubsetMode::Subseteq => {
            let mut out = CnfFormula::new(universe);
            let mut leaves: Vec<(usize, Vec<u32>)> = Vec::new();
            for &(x, y, host) in &placed {
                let id = out
                    .add_clause(vec![Lit::neg(x), Lit::pos(y)])
                    .expect("inclusion clause is over two distinct variables");
                leaves.push((host, vec![x.get(), y.get(), universe + 1 + id as u32]));
            }
            let mut dd = TreeDecomposition::new(universe as usize + out.num_clauses());
            for t in 0..d.num_nodes() {
                dd.add_bag(d.bag(t).to_vec());
            }
            for &(a, b) in d.tree_edges() {
                dd.add_edge(a, b);
            }
            for (host, bag) in leaves {
                let leaf = dd.add_bag(bag);
                dd.add_edge(host, leaf);
            }
            ProjectionCertificate {
                source_vars,
                target: out,
                decomposition: dd,
            }
        }
        SubsetMode::Strict => {
            // componentwise equality, each clause on its own leaf bag
            let mut eq = CnfFormula::new(universe);
            let mut eq_leaves: Vec<(usize, Vec<u32>)> = Vec::new();
            for &(x, y, host) in &placed {
                let fwd = eq
                    .add_clause(vec![Lit::neg(x), Lit::pos(y)])
                    .expect("equality clause is over two distinct variables");
                let bwd = eq
                    .add_clause(vec![Lit::pos(x), Lit::neg(y)])
                    .expect("equality clause is over two distinct variables");
                for id in [fwd, bwd] {
                    eq_leaves.push((host, vec![x.get(), y.get(), universe + 1 + id as u32]));
                }
            }
            let mut de = TreeDecomposition::new(universe as usize + eq.num_clauses());
            for t in 0..d.num_nodes() {
                de.add_bag(d.bag(t).to_vec());
            }
            for &(a, b) in d.tree_edges() {
                de.add_edge(a, b);
            }
            for (host, bag) in eq_leaves {
                let leaf = de.add_bag(bag);
                de.add_edge(host, leaf);
            }

            // complement: models are exactly the X ≠ Y assignments
            let ne = negate_projection(&eq, &de);

            // hang a private leaf per position off the complement's tree,
            // then conjoin the inclusion clauses placed on those leaves
            let mut d1 = ne.decomposition.clone();
            let mut f2 = CnfFormula::new(ne.target.num_vars());
            let mut empty_bags: Vec<Vec<u32>> = vec![Vec::new(); d1.num_nodes()];
            let mut d2_edges: Vec<(usize, usize)> = d1.tree_edges().to_vec();
            for &(x, y, _) in &placed {
                let host = (0..d1.num_nodes())
                    .find(|&t| {
                        let bag = d1.bag(t);
                        bag.binary_search(&x.get()).is_ok() && bag.binary_search(&y.get()).is_ok()
                    })
                    .expect("the complement keeps every source variable placed");
                let id = f2
                    .add_clause(vec![Lit::neg(x), Lit::pos(y)])
                    .expect("inclusion clause is over two distinct variables");
                let leaf = d1.add_bag(vec![x.get(), y.get()]);
                d1.add_edge(host, leaf);
                empty_bags.push(vec![
                    x.get(),
                    y.get(),
                    ne.target.num_vars() + 1 + id as u32,
                ]);
                d2_edges.push((host, leaf));
            }
            let mut d2 = TreeDecomposition::new(ne.target.num_vars() as usize + f2.num_clauses());
            for bag in empty_bags {
                d2.add_bag(bag);
            }
            for (a, b) in d2_edges {
                d2.add_edge(a, b);
            }

            let (target, dd) =
                conjoin(&ne.target, &f2, &d1, &d2).expect("leaf placement is always compatible");
            ProjectionCertificate {
                source_vars,
                target,
                decomposition: dd,
            }
        }
    };

    let k = d.width().expect("carrier has at least one node");
    let bound = subset_width_bound(k);
    let w = cert.decomposition.width().expect("output has nodes");
    assert!(w <= bound, "inclusion width {w} exceeds the bound {bound}");
    Ok(cert)
}

/// Inclusion clauses `(¬xᵢ ∨ yᵢ)` as an assembly piece. Positions with equal
/// variables are skipped.
pub(crate) fn subset_piece(xs: &[Var], ys: &[Var]) -> Piece {
    assert_eq!(xs.len(), ys.len());
    let mut piece = Piece::new();
    for (&x, &y) in xs.iter().zip(ys) {
        if x != y {
            piece.require(vec![Lit::neg(x), Lit::pos(y)]);
        }
    }
    piece
}

/// Strict inclusion as an assembly piece: the `⊆` clauses plus a chained
/// "some position is in `ys` only" witness. The chain's helper definitions
/// go straight into `f` and are full equivalences, so the piece composes
/// under later complementation; only the chain head is a core.
pub(crate) fn strict_subset_piece(f: &mut CnfFormula, xs: &[Var], ys: &[Var]) -> Piece {
    let mut piece = subset_piece(xs, ys);
    let mut head: Option<Lit> = None;
    for (&x, &y) in xs.iter().zip(ys) {
        if x == y {
            continue;
        }
        // t ↔ (y ∧ ¬x): position is in ys only
        let t = f.fresh_var();
        f.push_comment(format!("x{} = x{} without x{}", t.get(), y.get(), x.get()));
        f.add_clause(vec![Lit::neg(t), Lit::pos(y)]).unwrap();
        f.add_clause(vec![Lit::neg(t), Lit::neg(x)]).unwrap();
        f.add_clause(vec![Lit::pos(t), Lit::neg(y), Lit::pos(x)])
            .unwrap();
        head = Some(match head {
            None => Lit::pos(t),
            Some(prev) => {
                // o ↔ (prev ∨ t): some position so far is in ys only
                let o = f.fresh_var();
                f.push_comment(format!("x{} chains difference witnesses", o.get()));
                f.add_clause(vec![Lit::neg(o), prev, Lit::pos(t)]).unwrap();
                f.add_clause(vec![Lit::pos(o), prev.negated()]).unwrap();
                f.add_clause(vec![Lit::pos(o), Lit::neg(t)]).unwrap();
                Lit::pos(o)
            }
        });
    }
    match head {
        Some(h) => piece.require(vec![h]),
        // no position can differ, so a strict inclusion is impossible
        None => piece.require(Vec::new()),
    }
    piece
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnf::{incidence_graph, satisfiable, satisfiable_with};
    use crate::graph::Graph;
    use crate::treedec::{decompose, Strategy};

    /// Carrier over `universe` variables whose primal shape is a chain
    /// through all of them, so consecutive pairs share bags.
    fn chain_carrier(universe: u32) -> TreeDecomposition {
        let edges: Vec<(u32, u32)> = (1..universe).map(|v| (v, v + 1)).collect();
        decompose(&Graph::from_edges(universe as usize, edges), Strategy::MinFill)
    }

    fn vars(ids: &[u32]) -> Vec<Var> {
        ids.iter().map(|&v| Var::new(v)).collect()
    }

    /// All assignments of the pair variables, each checked for extendability.
    fn check_models(cert: &ProjectionCertificate, xs: &[Var], ys: &[Var], strict: bool) {
        assert!(cert
            .decomposition
            .validate(&incidence_graph(&cert.target))
            .is_ok());
        let srcs = &cert.source_vars;
        for mask in 0..1u32 << srcs.len() {
            let fixed: Vec<(Var, bool)> = srcs
                .iter()
                .enumerate()
                .map(|(i, &v)| (v, mask >> i & 1 == 1))
                .collect();
            let val = |v: Var| fixed.iter().find(|&&(w, _)| w == v).unwrap().1;
            let subset = xs.iter().zip(ys).all(|(&x, &y)| !val(x) || val(y));
            let proper = xs.iter().zip(ys).any(|(&x, &y)| !val(x) && val(y));
            let expect = subset && (!strict || proper);
            assert_eq!(
                satisfiable_with(&cert.target, &fixed),
                expect,
                "disagreement on mask {mask:b}"
            );
        }
    }

    #[test]
    fn single_pair_inclusion_is_one_clause() {
        let d = chain_carrier(2);
        let cert =
            subset_constraint(&vars(&[1]), &vars(&[2]), SubsetMode::Subseteq, &d).unwrap();
        assert_eq!(cert.target.num_clauses(), 1);
        check_models(&cert, &vars(&[1]), &vars(&[2]), false);
    }

    #[test]
    fn single_pair_strict_leaves_one_model() {
        let d = chain_carrier(2);
        let cert = subset_constraint(&vars(&[1]), &vars(&[2]), SubsetMode::Strict, &d).unwrap();
        check_models(&cert, &vars(&[1]), &vars(&[2]), true);
    }

    #[test]
    fn no_set_is_a_strict_subset_of_itself() {
        let d = chain_carrier(3);
        let xs = vars(&[1, 2, 3]);
        let cert = subset_constraint(&xs, &xs, SubsetMode::Strict, &d).unwrap();
        assert!(!satisfiable(&cert.target));
    }

    #[test]
    fn rejects_bad_inputs() {
        let d = chain_carrier(4);
        assert_eq!(
            subset_constraint(&vars(&[1]), &vars(&[2, 3]), SubsetMode::Subseteq, &d),
            Err(SubsetError::LengthMismatch { left: 1, right: 2 })
        );
        assert_eq!(
            subset_constraint(&vars(&[1, 3]), &vars(&[2, 1]), SubsetMode::Subseteq, &d),
            Err(SubsetError::DuplicateVar { var: 1 })
        );
        assert_eq!(
            subset_constraint(&vars(&[9]), &vars(&[2]), SubsetMode::Subseteq, &d),
            Err(SubsetError::VarOutOfRange { var: 9 })
        );
        // two singleton bags, never together
        let mut apart = TreeDecomposition::new(2);
        let a = apart.add_bag(vec![1]);
        let b = apart.add_bag(vec![2]);
        apart.add_edge(a, b);
        assert_eq!(
            subset_constraint(&vars(&[1]), &vars(&[2]), SubsetMode::Subseteq, &apart),
            Err(SubsetError::PairNotCovered { index: 0 })
        );
    }

    #[test]
    fn random_blocks_agree_with_direct_enumeration() {
        let mut state = 0x5eed5u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for round in 0..60 {
            let p = 1 + (next() % 4) as u32;
            let universe = 2 * p + 1 + (next() % 2) as u32;
            let mut ids: Vec<u32> = (1..=universe).collect();
            // shuffle so the pairs land in scattered carrier bags
            for i in (1..ids.len()).rev() {
                ids.swap(i, (next() % (i as u64 + 1)) as usize);
            }
            let mut xs = vars(&ids[..p as usize]);
            let mut ys = vars(&ids[p as usize..2 * p as usize]);
            if round % 5 == 0 {
                // include an inclusion-neutral equal pair
                xs.push(Var::new(ids[2 * p as usize]));
                ys.push(Var::new(ids[2 * p as usize]));
            }
            let mut carrier_edges: Vec<(u32, u32)> = (1..universe).map(|v| (v, v + 1)).collect();
            for (x, y) in xs.iter().zip(&ys) {
                if x != y {
                    carrier_edges.push((x.get(), y.get()));
                }
            }
            let d = decompose(
                &Graph::from_edges(universe as usize, carrier_edges),
                Strategy::MinFill,
            );
            let mode = if next() % 2 == 0 {
                SubsetMode::Subseteq
            } else {
                SubsetMode::Strict
            };
            let cert = subset_constraint(&xs, &ys, mode, &d).unwrap();
            check_models(&cert, &xs, &ys, mode == SubsetMode::Strict);
            assert!(
                cert.decomposition.width().unwrap() <= subset_width_bound(d.width().unwrap())
            );
        }
    }

    #[test]
    fn pieces_match_the_certificate_semantics() {
        let mut state = 0x77abcdu64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for _ in 0..40 {
            let p = 1 + (next() % 4) as u32;
            let universe = 2 * p;
            let xs = vars(&(1..=p).collect::<Vec<_>>());
            let ys = vars(&(p + 1..=2 * p).collect::<Vec<_>>());
            let strict = next() % 2 == 0;
            let mut f = CnfFormula::new(universe);
            let piece = if strict {
                strict_subset_piece(&mut f, &xs, &ys)
            } else {
                subset_piece(&xs, &ys)
            };
            piece.assert_into(&mut f);
            for mask in 0..1u32 << universe {
                let fixed: Vec<(Var, bool)> = (0..universe)
                    .map(|i| (Var::new(i + 1), mask >> i & 1 == 1))
                    .collect();
                let val = |v: Var| fixed[(v.get() - 1) as usize].1;
                let subset = xs.iter().zip(&ys).all(|(&x, &y)| !val(x) || val(y));
                let proper = xs.iter().zip(&ys).any(|(&x, &y)| !val(x) && val(y));
                let expect = subset && (!strict || proper);
                assert_eq!(satisfiable_with(&f, &fixed), expect);
            }
        }
    }

    #[test]
    fn strict_piece_of_identical_blocks_is_unsatisfiable() {
        let mut f = CnfFormula::new(2);
        let xs = vars(&[1, 2]);
        let piece = strict_subset_piece(&mut f, &xs, &xs);
        piece.assert_into(&mut f);
        assert!(!satisfiable(&f));
    }
}
