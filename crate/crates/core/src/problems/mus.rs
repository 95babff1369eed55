//! Membership in a minimal unsatisfiable subset: a clause belongs to some
//! minimal unsatisfiable subset of a formula exactly when some satisfiable
//! subset of the other clauses becomes unsatisfiable once the clause is
//! added. The decision route states the negation of that as one ∀∃
//! formula over a subset choice and a universal assignment copy, using
//! per-clause indicator variables tied to each assignment copy; an
//! exhaustive subset-enumeration oracle cross-validates it.

use super::assemble::{split_forall_exists, Assembly};
use super::ProblemError;
use crate::cnf::{parse_dimacs, satisfiable, write_dimacs, CnfFormula, Lit, Var};
use crate::qbf::{chen_solve, QbfFormula};
use crate::transform::reify::Piece;
use crate::treedec::TreeDecomposition;
use std::collections::BTreeSet;

/// Largest clause count the exhaustive oracle accepts.
pub const MUS_CLAUSE_CAP: usize = 16;
/// Largest variable universe the exhaustive oracle accepts.
pub const MUS_VARIABLE_CAP: usize = 20;

/// A membership query: a formula and the index of the clause being asked
/// about.
#[derive(Debug, Clone)]
pub struct MusQuery {
    formula: CnfFormula,
    clause: usize,
}

impl MusQuery {
    pub fn new(formula: CnfFormula, clause: usize) -> Result<Self, ProblemError> {
        if clause >= formula.num_clauses() {
            return Err(ProblemError::InvalidClauseId(clause));
        }
        Ok(Self { formula, clause })
    }

    pub fn formula(&self) -> &CnfFormula {
        &self.formula
    }

    pub fn clause(&self) -> usize {
        self.clause
    }
}

/// Clauses tying an indicator variable to each clause of `f` over a
/// renamed variable copy: the indicator holds exactly when the clause is
/// satisfied by the copy.
fn indicator_clauses(
    f: &CnfFormula,
    x_of: &dyn Fn(Var) -> Var,
    ind_of: &dyn Fn(usize) -> Var,
) -> Vec<Vec<Lit>> {
    let map = |l: Lit| {
        let v = x_of(l.var());
        if l.is_positive() {
            Lit::pos(v)
        } else {
            Lit::neg(v)
        }
    };
    let mut out = Vec::new();
    for (j, c) in f.clauses() {
        let mut long = vec![Lit::neg(ind_of(j))];
        long.extend(c.literals.iter().map(|&l| map(l)));
        out.push(long);
        for &l in &c.literals {
            out.push(vec![Lit::pos(ind_of(j)), map(l).negated()]);
        }
    }
    out
}

/// Does the queried clause belong to some minimal unsatisfiable subset?
///
/// Decided through the negation: for every choice of companion clauses,
/// either the companions alone are already unsatisfiable (no assignment
/// copy turns all their indicators on) or the companions plus the queried
/// clause are satisfiable (a second copy turns all those indicators on).
pub fn mus_membership(q: &MusQuery) -> bool {
    let f = &q.formula;
    let c = q.clause;
    let n = f.num_vars();
    let m = f.num_clauses();
    let h = (m - 1) as u32;
    let sel = |j: usize| -> Var {
        let rank = if j < c { j } else { j - 1 };
        Var::new(rank as u32 + 1)
    };
    let x1 = |v: Var| Var::new(h + v.get());
    let ind1 = |j: usize| Var::new(h + n + j as u32 + 1);
    let x2 = |v: Var| Var::new(h + n + m as u32 + v.get());
    let ind2 = |j: usize| Var::new(h + 2 * n + m as u32 + j as u32 + 1);

    let mut asm = Assembly::new(h + 2 * n + 2 * (m as u32));
    let mut companions_sat = asm.sub();
    for lits in indicator_clauses(f, &x1, &ind1) {
        companions_sat
            .add_clause(lits)
            .expect("indicator clause is well-formed");
    }
    for j in (0..m).filter(|&j| j != c) {
        companions_sat
            .add_clause(vec![Lit::neg(sel(j)), Lit::pos(ind1(j))])
            .expect("selection clause is well-formed");
    }
    let companions_unsat = asm.complement(&companions_sat);

    let mut with_clause_sat = Piece::new();
    for lits in indicator_clauses(f, &x2, &ind2) {
        with_clause_sat.require(lits);
    }
    for j in (0..m).filter(|&j| j != c) {
        with_clause_sat.require(vec![Lit::neg(sel(j)), Lit::pos(ind2(j))]);
    }
    with_clause_sat.require(vec![Lit::pos(ind2(c))]);

    asm.select_one(&[companions_unsat, with_clause_sat]);
    let universal: Vec<Var> = (1..=h + n + m as u32).map(Var::new).collect();
    !chen_solve(&asm.into_forall_exists(universal))
}

/// All minimal unsatisfiable subsets (as clause-index sets, ascending by
/// bitmask), by exhaustive enumeration. Formulas beyond [`MUS_CLAUSE_CAP`]
/// clauses or [`MUS_VARIABLE_CAP`] variables are rejected.
pub fn mus_oracle(f: &CnfFormula) -> Result<Vec<BTreeSet<usize>>, ProblemError> {
    let m = f.num_clauses();
    if m > MUS_CLAUSE_CAP {
        return Err(ProblemError::CapExceeded {
            size: m,
            cap: MUS_CLAUSE_CAP,
        });
    }
    let n = f.num_vars() as usize;
    if n > MUS_VARIABLE_CAP {
        return Err(ProblemError::CapExceeded {
            size: n,
            cap: MUS_VARIABLE_CAP,
        });
    }
    let sat: Vec<bool> = (0..1u64 << m)
        .map(|mask| {
            let mut sub = CnfFormula::new(f.num_vars());
            for (j, c) in f.clauses() {
                if mask >> j & 1 == 1 {
                    sub.add_clause(c.literals.clone())
                        .expect("copied clause is well-formed");
                }
            }
            satisfiable(&sub)
        })
        .collect();
    Ok((0..1u32 << m)
        .filter(|&mask| {
            !sat[mask as usize]
                && (0..m)
                    .all(|j| mask >> j & 1 == 0 || sat[(mask & !(1 << j)) as usize])
        })
        .map(|mask| (0..m).filter(|&j| mask >> j & 1 == 1).collect())
        .collect())
}

/// Reads a membership query: a DIMACS body plus the header comment
/// `c mus clause <id>` naming the queried clause 1-based. The header is
/// required exactly once; other comments are kept with the formula.
pub fn parse_mus(input: &str) -> Result<MusQuery, ProblemError> {
    let parsed = parse_dimacs(input)?;
    let mut formula = CnfFormula::new(parsed.num_vars());
    let mut clause: Option<usize> = None;
    for comment in parsed.comments() {
        let tokens: Vec<&str> = comment.split_whitespace().collect();
        match tokens.as_slice() {
            ["mus", "clause", id] => {
                if clause.is_some() {
                    return Err(ProblemError::Format(
                        "duplicate `mus clause` header".to_string(),
                    ));
                }
                let id: usize = id
                    .parse()
                    .map_err(|_| ProblemError::Format(format!("bad clause index `{id}`")))?;
                if id < 1 || id > parsed.num_clauses() {
                    return Err(ProblemError::InvalidClauseId(id));
                }
                clause = Some(id - 1);
            }
            ["mus", ..] => {
                return Err(ProblemError::Format(format!(
                    "unrecognized header `c{comment}`"
                )));
            }
            _ => formula.push_comment(comment.clone()),
        }
    }
    let clause =
        clause.ok_or_else(|| ProblemError::Format("missing `c mus clause` header".to_string()))?;
    for (_, c) in parsed.clauses() {
        formula
            .add_clause(c.literals.clone())
            .expect("reparsed clause is well-formed");
    }
    MusQuery::new(formula, clause)
}

/// Writes a query in the format accepted by [`parse_mus`].
pub fn write_mus(q: &MusQuery) -> String {
    let mut out = CnfFormula::new(q.formula.num_vars());
    out.push_comment(format!(" mus clause {}", q.clause + 1));
    for comment in q.formula.comments() {
        out.push_comment(comment.clone());
    }
    for (_, c) in q.formula.clauses() {
        out.add_clause(c.literals.clone())
            .expect("copied clause is well-formed");
    }
    write_dimacs(&out, true)
}

/// Builds a membership query whose verdict is the *negation* of the given
/// ∀∃ formula: both polarities of every universal variable enter as unit
/// clauses, the queried clause is a fresh unit whose variable guards every
/// matrix clause, and the guarded matrix can only be blamed when some
/// universal half admits no matrix-satisfying completion.
pub fn generate_mus_from_qbf(q: &QbfFormula) -> Result<MusQuery, ProblemError> {
    let (xs, _) = split_forall_exists(q).map_err(ProblemError::UnsupportedPrefix)?;
    let f = q.matrix();
    let n = f.num_vars();
    let w = Var::new(n + 1);
    let mut out = CnfFormula::new(n + 1);
    for &x in &xs {
        out.add_clause(vec![Lit::pos(x)])
            .expect("unit clause is well-formed");
        out.add_clause(vec![Lit::neg(x)])
            .expect("unit clause is well-formed");
    }
    let query = out
        .add_clause(vec![Lit::pos(w)])
        .expect("unit clause is well-formed");
    for (_, c) in f.clauses() {
        let mut lits = vec![Lit::neg(w)];
        lits.extend(c.literals.iter().copied());
        out.add_clause(lits)
            .expect("guarded matrix clause is well-formed");
    }
    MusQuery::new(out, query)
}

/// Transfers a decomposition of the input formula's primal graph to the
/// primal graph of the formula produced by [`generate_mus_from_qbf`]: the
/// guard variable joins every bag, so for input width `k` the result has
/// width at most `k + 1`.
pub fn mus_decomposition_from_qbf(
    q: &QbfFormula,
    d: &TreeDecomposition,
) -> Result<TreeDecomposition, ProblemError> {
    let f = q.matrix();
    let report = d.validate(&crate::cnf::primal_graph(f));
    if !report.is_ok() {
        return Err(ProblemError::InvalidDecomposition(report.violations));
    }
    let n = f.num_vars();
    let w = n + 1;
    let mut out = TreeDecomposition::new(n as usize + 1);
    let interior = d.num_nodes().max(1);
    for t in 0..interior {
        let mut bag: Vec<u32> = if t < d.num_nodes() {
            d.bag(t).to_vec()
        } else {
            Vec::new()
        };
        bag.push(w);
        out.add_bag(bag);
    }
    for &(s, t) in d.tree_edges() {
        out.add_edge(s, t);
    }
    Ok(out)
}
