//! Shared plumbing for building quantified encodings: a growing clause
//! matrix, complements of sub-formulas spliced in as guarded pieces, and
//! selector clauses that pick at least one alternative.
//!
//! The central trick is uniform across the frontends: a disjunction of
//! properties is encoded by giving every property a selector variable,
//! weakening each of its clauses by the selector's negation, and asserting
//! that some selector is true. A property that is itself the *negation* of a
//! CNF formula is expressed by witness variables, one per clause, each
//! definable only when its clause is falsified; the negation then holds
//! exactly when some witness can be raised.

use crate::cnf::{CnfFormula, Lit, Var};
use crate::qbf::{QbfFormula, QuantifierBlock};
use crate::transform::reify::Piece;
use crate::transform::strict_subset_piece;
use crate::treedec::Strategy;

/// Heuristic choice mirroring the solver's default: exhaustive fill-in
/// scoring while the graph is small, degree scoring beyond that.
pub(crate) fn pick_strategy(num_vertices: usize) -> Strategy {
    if num_vertices <= 200 {
        Strategy::MinFill
    } else {
        Strategy::MinDegree
    }
}

/// A quantified matrix under construction.
pub(crate) struct Assembly {
    f: CnfFormula,
}

impl Assembly {
    pub fn new(num_vars: u32) -> Self {
        Assembly {
            f: CnfFormula::new(num_vars),
        }
    }

    /// An empty formula over the current variable space, for building a
    /// sub-formula that will be complemented.
    pub fn sub(&self) -> CnfFormula {
        CnfFormula::new(self.f.num_vars())
    }

    /// Asserts one clause outright.
    pub fn require(&mut self, lits: Vec<Lit>) {
        self.f
            .add_clause(lits)
            .expect("assembled clause is well-formed");
    }

    /// Asserts every core of a piece outright.
    pub fn assert(&mut self, piece: &Piece) {
        piece.assert_into(&mut self.f);
    }

    /// Splices in the complement of `sub`, which must extend this assembly's
    /// variable space. Every clause of `sub` gets a witness variable that
    /// may be raised only when the clause is falsified, and an accumulator
    /// chain collects the witnesses three literals at a time, so no clause
    /// here grows with the sub-formula. The definitions join the matrix
    /// outright; the returned piece's single core demands the chain's head.
    /// For fixed values of `sub`'s variables the core is satisfiable exactly
    /// when `sub` is falsified.
    pub fn complement(&mut self, sub: &CnfFormula) -> Piece {
        assert!(
            sub.num_vars() >= self.f.num_vars(),
            "sub-formula lives in the assembly's variable space"
        );
        while self.f.num_vars() < sub.num_vars() {
            self.f.fresh_var();
        }
        let mut head: Option<Lit> = None;
        for (_, c) in sub.clauses() {
            let e = self.f.fresh_var();
            for &l in &c.literals {
                self.f
                    .add_clause(vec![Lit::neg(e), l.negated()])
                    .expect("witness definition is well-formed");
            }
            head = Some(match head {
                None => Lit::pos(e),
                Some(prev) => {
                    let t = self.f.fresh_var();
                    self.f
                        .add_clause(vec![Lit::neg(t), Lit::pos(e), prev])
                        .expect("accumulator definition is well-formed");
                    Lit::pos(t)
                }
            });
        }
        let mut piece = Piece::new();
        piece.require(head.into_iter().collect());
        piece
    }

    /// Chained strict-inclusion piece `xs ⊂ ys`; its helper definitions are
    /// added to the matrix unguarded (they are full equivalences, so they
    /// never constrain the original variables on their own).
    pub fn strict_subset(&mut self, xs: &[Var], ys: &[Var]) -> Piece {
        strict_subset_piece(&mut self.f, xs, ys)
    }

    /// Adds all pieces as guarded alternatives plus the clause demanding
    /// that at least one of them holds. Returns the selector variables.
    pub fn select_one(&mut self, pieces: &[Piece]) -> Vec<Var> {
        let selectors: Vec<Var> = pieces.iter().map(|_| self.f.fresh_var()).collect();
        for (piece, &s) in pieces.iter().zip(&selectors) {
            piece.assert_unless(&mut self.f, Lit::neg(s));
        }
        self.f
            .add_clause(selectors.iter().map(|&s| Lit::pos(s)).collect())
            .expect("selector clause is well-formed");
        selectors
    }

    /// Finishes as a ∀∃ formula: `universal` leads, everything else is
    /// existential.
    pub fn into_forall_exists(self, universal: Vec<Var>) -> QbfFormula {
        let rest = remaining(self.f.num_vars(), &[&universal]);
        QbfFormula::new(
            vec![
                QuantifierBlock::forall(universal),
                QuantifierBlock::exists(rest),
            ],
            self.f,
        )
        .expect("assembled prefix covers the matrix")
    }

    /// Finishes as an ∃∀∃ formula: variables outside the two leading blocks
    /// fill the innermost existential block.
    pub fn into_exists_forall_exists(self, outer: Vec<Var>, middle: Vec<Var>) -> QbfFormula {
        let rest = remaining(self.f.num_vars(), &[&outer, &middle]);
        QbfFormula::new(
            vec![
                QuantifierBlock::exists(outer),
                QuantifierBlock::forall(middle),
                QuantifierBlock::exists(rest),
            ],
            self.f,
        )
        .expect("assembled prefix covers the matrix")
    }
}

/// Variables of `1..=n` not listed in any of the given blocks.
fn remaining(n: u32, blocks: &[&Vec<Var>]) -> Vec<Var> {
    let mut used = vec![false; n as usize + 1];
    for block in blocks {
        for v in block.iter() {
            used[v.get() as usize] = true;
        }
    }
    (1..=n).filter(|&v| !used[v as usize]).map(Var::new).collect()
}

/// Splits a prefix of at most two blocks into (universal, existential)
/// variable lists, accepting the degenerate pure-∀, pure-∃, and closed
/// shapes. Anything else is reported to the caller.
pub(crate) fn split_forall_exists(q: &QbfFormula) -> Result<(Vec<Var>, Vec<Var>), String> {
    use crate::qbf::Quantifier;
    let blocks = q.prefix();
    match blocks.len() {
        0 => Ok((Vec::new(), Vec::new())),
        1 => match blocks[0].quantifier {
            Quantifier::Forall => Ok((blocks[0].vars.clone(), Vec::new())),
            Quantifier::Exists => Ok((Vec::new(), blocks[0].vars.clone())),
        },
        2 if blocks[0].quantifier == Quantifier::Forall => {
            Ok((blocks[0].vars.clone(), blocks[1].vars.clone()))
        }
        2 => Err("the two-block prefix must be universal-then-existential".to_string()),
        n => Err(format!("expected at most two blocks, found {n}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnf::satisfiable_with;
    use crate::qbf::{brute_force_eval, chen_solve};

    #[test]
    fn complement_piece_flips_a_small_formula() {
        // sub = (x1 ∨ x2) ∧ (¬x1 ∨ x3); its complement piece must be
        // satisfiable exactly on the five falsifying assignments.
        let mut asm = Assembly::new(3);
        let mut sub = asm.sub();
        sub.add_clause(vec![Lit::pos(Var::new(1)), Lit::pos(Var::new(2))])
            .unwrap();
        sub.add_clause(vec![Lit::neg(Var::new(1)), Lit::pos(Var::new(3))])
            .unwrap();
        let piece = asm.complement(&sub);
        asm.assert(&piece);
        let q = asm.into_forall_exists(Vec::new());
        let probe = q.matrix().clone();
        for mask in 0..8u32 {
            let vals: Vec<bool> = (0..3).map(|i| mask >> i & 1 == 1).collect();
            let fixed: Vec<(Var, bool)> = vals
                .iter()
                .enumerate()
                .map(|(i, &b)| (Var::new(i as u32 + 1), b))
                .collect();
            let holds = (vals[0] || vals[1]) && (!vals[0] || vals[2]);
            assert_eq!(
                satisfiable_with(&probe, &fixed),
                !holds,
                "complement wrong at {mask:#b}"
            );
        }
    }

    #[test]
    fn selected_alternatives_act_as_a_disjunction() {
        // ∀x1 ∃… : (¬sub) ∨ (x1): sub = (x1), so the first alternative
        // covers x1 = false and the second covers x1 = true.
        let mut asm = Assembly::new(1);
        let mut sub = asm.sub();
        sub.add_clause(vec![Lit::pos(Var::new(1))]).unwrap();
        let p1 = asm.complement(&sub);
        let p2 = Piece {
            cores: vec![vec![Lit::pos(Var::new(1))]],
        };
        asm.select_one(&[p1, p2]);
        let q = asm.into_forall_exists(vec![Var::new(1)]);
        assert!(chen_solve(&q));
        assert!(brute_force_eval(&q).unwrap());
    }

    #[test]
    fn prefix_split_accepts_degenerate_shapes() {
        let f = CnfFormula::new(2);
        let q = QbfFormula::new(
            vec![QuantifierBlock::exists(vec![Var::new(1), Var::new(2)])],
            f,
        )
        .unwrap();
        let (u, e) = split_forall_exists(&q).unwrap();
        assert!(u.is_empty());
        assert_eq!(e.len(), 2);

        let f = CnfFormula::new(2);
        let bad = QbfFormula::new(
            vec![
                QuantifierBlock::exists(vec![Var::new(1)]),
                QuantifierBlock::forall(vec![Var::new(2)]),
            ],
            f,
        )
        .unwrap();
        assert!(split_forall_exists(&bad).is_err());
    }
}
