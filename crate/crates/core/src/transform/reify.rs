//! Internal building blocks for assembling problem encodings: literals that
//! stand for clauses, conjunctions, and disjunctions, with defining clauses
//! in both directions so every helper variable is forced by the variables it
//! is defined from. That property is what lets assembled formulas be negated
//! or guarded without picking up spurious models.

use crate::cnf::{CnfFormula, Lit};

/// Returns a literal equivalent to `l1 ∨ ... ∨ lk`, adding defining clauses.
/// An empty disjunction yields a literal forced false.
pub(crate) fn reify_clause(f: &mut CnfFormula, lits: &[Lit]) -> Lit {
    if lits.len() == 1 {
        return lits[0];
    }
    let s = f.fresh_var();
    for &l in lits {
        f.add_clause(vec![l.negated(), Lit::pos(s)])
            .expect("definition clause is over distinct variables");
    }
    let mut back: Vec<Lit> = vec![Lit::neg(s)];
    back.extend_from_slice(lits);
    f.add_clause(back)
        .expect("definition clause is over distinct variables");
    Lit::pos(s)
}

/// Returns a literal equivalent to `l1 ∧ ... ∧ lk`, chaining pairwise so all
/// defining clauses have at most three literals. An empty conjunction yields
/// a literal forced true.
pub(crate) fn reify_and(f: &mut CnfFormula, lits: &[Lit]) -> Lit {
    if lits.is_empty() {
        let t = f.fresh_var();
        f.add_clause(vec![Lit::pos(t)]).unwrap();
        return Lit::pos(t);
    }
    let mut acc = lits[0];
    for &l in &lits[1..] {
        let t = f.fresh_var();
        f.add_clause(vec![Lit::neg(t), acc]).unwrap();
        f.add_clause(vec![Lit::neg(t), l]).unwrap();
        f.add_clause(vec![Lit::pos(t), acc.negated(), l.negated()])
            .expect("conjunction links are over distinct variables");
        acc = Lit::pos(t);
    }
    acc
}

/// Returns a literal equivalent to `l1 ∨ ... ∨ lk` built from the
/// conjunction chain, so all defining clauses stay at three literals.
pub(crate) fn reify_or(f: &mut CnfFormula, lits: &[Lit]) -> Lit {
    let negated: Vec<Lit> = lits.iter().map(|l| l.negated()).collect();
    reify_and(f, &negated).negated()
}

/// A partial encoding: its defining clauses are already in the formula, and
/// `cores` lists the clauses that actually assert the encoded property.
/// The caller decides whether to assert them outright, assert them under an
/// escape literal, or fold them into a single reified literal.
#[derive(Debug, Clone, Default)]
pub(crate) struct Piece {
    pub cores: Vec<Vec<Lit>>,
}

impl Piece {
    pub fn new() -> Self {
        Piece { cores: Vec::new() }
    }

    pub fn require(&mut self, lits: Vec<Lit>) {
        self.cores.push(lits);
    }

    pub fn merge(&mut self, other: Piece) {
        self.cores.extend(other.cores);
    }

    /// Asserts every core clause.
    pub fn assert_into(&self, f: &mut CnfFormula) {
        for c in &self.cores {
            f.add_clause(c.clone()).expect("core clause is well-formed");
        }
    }

    /// Asserts every core clause weakened by an escape literal: when
    /// `escape` is false the piece must hold, when true it is vacuous.
    pub fn assert_unless(&self, f: &mut CnfFormula, escape: Lit) {
        for c in &self.cores {
            let mut lits = c.clone();
            lits.push(escape);
            f.add_clause(lits).expect("guarded core clause is well-formed");
        }
    }

    /// Returns a literal equivalent to the whole piece holding.
    pub fn holds(&self, f: &mut CnfFormula) -> Lit {
        let mut parts = Vec::with_capacity(self.cores.len());
        for c in &self.cores {
            parts.push(reify_clause(f, c));
        }
        reify_and(f, &parts)
    }
}
