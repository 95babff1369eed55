//! Propositional abduction: given a background theory, a set of hypothesis
//! variables, and a set of manifestation variables, a *solution* is a set
//! of hypotheses whose addition to the theory stays consistent and entails
//! every manifestation.
//!
//! Queries come in two tiers. The flat tier (solvable, relevance,
//! necessity) is decided by one ∀∃ formula built around a universally
//! chosen candidate set; the subset tier (relevance and necessity with
//! respect to ⊆-minimal solutions) adds one more alternation to rule out
//! strictly smaller solutions. Both routes are cross-validated against an
//! exhaustive oracle.

use super::assemble::{pick_strategy, Assembly};
use super::ProblemError;
use crate::cnf::{incidence_graph, parse_dimacs, satisfiable_with, write_dimacs, CnfFormula, Lit, Var};
use crate::qbf::{chen_solve, QbfFormula, Quantifier};
use crate::transform::negate_projection;
use crate::transform::reify::Piece;
use crate::transform::strict_subset_piece;
use crate::treedec::decompose;
use std::collections::BTreeSet;

/// Largest hypothesis set the exhaustive oracle accepts.
pub const PAP_HYPOTHESIS_CAP: usize = 14;
/// Largest variable universe the exhaustive oracle accepts.
pub const PAP_VARIABLE_CAP: usize = 24;

/// An abduction instance: theory, hypothesis variables, manifestation
/// variables. Hypotheses and manifestations are kept sorted and deduplicated
/// and may overlap.
#[derive(Debug, Clone)]
pub struct PapInstance {
    theory: CnfFormula,
    hypotheses: Vec<Var>,
    manifestations: Vec<Var>,
}

impl PapInstance {
    pub fn new(
        theory: CnfFormula,
        mut hypotheses: Vec<Var>,
        mut manifestations: Vec<Var>,
    ) -> Result<Self, ProblemError> {
        for &v in hypotheses.iter().chain(manifestations.iter()) {
            if v.get() > theory.num_vars() {
                return Err(ProblemError::VarOutOfRange(v.get()));
            }
        }
        hypotheses.sort_unstable();
        hypotheses.dedup();
        manifestations.sort_unstable();
        manifestations.dedup();
        Ok(Self {
            theory,
            hypotheses,
            manifestations,
        })
    }

    pub fn theory(&self) -> &CnfFormula {
        &self.theory
    }

    pub fn hypotheses(&self) -> &[Var] {
        &self.hypotheses
    }

    pub fn manifestations(&self) -> &[Var] {
        &self.manifestations
    }

    fn hypothesis_index(&self, h: Var) -> Result<usize, ProblemError> {
        self.hypotheses
            .binary_search(&h)
            .map_err(|_| ProblemError::NotAHypothesis(h.get()))
    }
}

/// Queries over arbitrary solutions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AbductionQuery {
    /// Does any solution exist?
    Solvable,
    /// Is the hypothesis part of some solution?
    Relevance(Var),
    /// Does every model of the theory plus any solution make the
    /// hypothesis true? (Vacuously holds when nothing is solvable.)
    Necessity(Var),
}

/// Queries over ⊆-minimal solutions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubsetQuery {
    /// Is the hypothesis part of some ⊆-minimal solution?
    SubsetRelevance(Var),
    /// Is the hypothesis part of every ⊆-minimal solution?
    SubsetNecessity(Var),
}

fn shift(l: Lit, offset: u32) -> Lit {
    let v = Var::new(l.var().get() + offset);
    if l.is_positive() {
        Lit::pos(v)
    } else {
        Lit::neg(v)
    }
}

/// The ∀∃ formula saying every candidate set fails: for each subset of the
/// hypotheses (selectors) and each assignment of the theory copy, either
/// the assignment breaks the theory or an assumed hypothesis, or a second
/// theory copy refutes the candidate by missing a manifestation, or the
/// optional extra alternative holds.
fn counter_qbf(
    theory: &CnfFormula,
    hyps: &[Var],
    mans: &[Var],
    third: Option<Vec<Lit>>,
) -> QbfFormula {
    let h = hyps.len() as u32;
    let n = theory.num_vars();
    let sel = |j: usize| Var::new(j as u32 + 1);
    let mut asm = Assembly::new(h + 2 * n);

    let mut supported = asm.sub();
    for (_, c) in theory.clauses() {
        supported
            .add_clause(c.literals.iter().map(|&l| shift(l, h)).collect())
            .expect("shifted theory clause is well-formed");
    }
    for (j, &hv) in hyps.iter().enumerate() {
        supported
            .add_clause(vec![Lit::neg(sel(j)), Lit::pos(Var::new(h + hv.get()))])
            .expect("assumption clause is well-formed");
    }
    let unsupported = asm.complement(&supported);

    let mut refuted = Piece::new();
    for (_, c) in theory.clauses() {
        refuted.require(c.literals.iter().map(|&l| shift(l, h + n)).collect());
    }
    for (j, &hv) in hyps.iter().enumerate() {
        refuted.require(vec![Lit::neg(sel(j)), Lit::pos(Var::new(h + n + hv.get()))]);
    }
    refuted.require(
        mans.iter()
            .map(|&m| Lit::neg(Var::new(h + n + m.get())))
            .collect(),
    );

    let mut pieces = vec![unsupported, refuted];
    if let Some(lits) = third {
        let mut extra = Piece::new();
        extra.require(lits);
        pieces.push(extra);
    }
    asm.select_one(&pieces);
    asm.into_forall_exists((1..=h + n).map(Var::new).collect())
}

/// Decides a flat abduction query.
pub fn abduction(p: &PapInstance, query: AbductionQuery) -> Result<bool, ProblemError> {
    match query {
        AbductionQuery::Solvable => Ok(!chen_solve(&counter_qbf(
            &p.theory,
            &p.hypotheses,
            &p.manifestations,
            None,
        ))),
        AbductionQuery::Relevance(h) => {
            p.hypothesis_index(h)?;
            // a solution containing h exists exactly when the theory
            // strengthened by h is solvable: adding h to any solution of
            // the strengthened theory changes nothing it entails
            let mut strengthened = p.theory.clone();
            strengthened
                .add_clause(vec![Lit::pos(h)])
                .expect("hypothesis variable is in range");
            Ok(!chen_solve(&counter_qbf(
                &strengthened,
                &p.hypotheses,
                &p.manifestations,
                None,
            )))
        }
        AbductionQuery::Necessity(h) => {
            p.hypothesis_index(h)?;
            let hcount = p.hypotheses.len() as u32;
            Ok(chen_solve(&counter_qbf(
                &p.theory,
                &p.hypotheses,
                &p.manifestations,
                Some(vec![Lit::pos(Var::new(hcount + h.get()))]),
            )))
        }
    }
}

/// The ∃∀∃ formula saying some ⊆-minimal solution contains (or omits) the
/// given hypothesis. The outer block picks the candidate and a witnessing
/// model; universally, no second model refutes it and every strictly
/// smaller candidate either is no strict subset after all, or has no
/// model, or is refuted by an inner countermodel.
fn minimal_solution_qbf(p: &PapInstance, h: Var, include: bool) -> QbfFormula {
    let hyps = &p.hypotheses;
    let mans = &p.manifestations;
    let hc = hyps.len() as u32;
    let n = p.theory.num_vars();
    let sel = |j: usize| Var::new(j as u32 + 1);
    let x = |v: Var| Var::new(hc + v.get());
    let xp = |v: Var| Var::new(hc + n + v.get());
    let sel2 = |j: usize| Var::new(hc + 2 * n + j as u32 + 1);
    let x2 = |v: Var| Var::new(2 * hc + 2 * n + v.get());
    let x3 = |v: Var| Var::new(2 * hc + 3 * n + v.get());
    let j_of_h = p
        .hypothesis_index(h)
        .expect("caller validated the hypothesis");

    let mut asm = Assembly::new(2 * hc + 4 * n);
    // the candidate has a witnessing model and the queried polarity
    for (_, c) in p.theory.clauses() {
        asm.require(c.literals.iter().map(|&l| shift(l, hc)).collect());
    }
    for (j, &hv) in hyps.iter().enumerate() {
        asm.require(vec![Lit::neg(sel(j)), Lit::pos(x(hv))]);
    }
    asm.require(vec![if include {
        Lit::pos(sel(j_of_h))
    } else {
        Lit::neg(sel(j_of_h))
    }]);
    // no universally chosen model refutes the candidate
    let mut counter = asm.sub();
    for (_, c) in p.theory.clauses() {
        counter
            .add_clause(c.literals.iter().map(|&l| shift(l, hc + n)).collect())
            .expect("shifted theory clause is well-formed");
    }
    for (j, &hv) in hyps.iter().enumerate() {
        counter
            .add_clause(vec![Lit::neg(sel(j)), Lit::pos(xp(hv))])
            .expect("assumption clause is well-formed");
    }
    counter
        .add_clause(mans.iter().map(|&m| Lit::neg(xp(m))).collect())
        .expect("manifestation clause is well-formed");
    let no_counter = asm.complement(&counter);
    asm.assert(&no_counter);

    // alternatives against the universally chosen smaller candidate
    let mut strict = asm.sub();
    let before = strict.num_vars();
    let smaller_sels: Vec<Var> = (0..hyps.len()).map(sel2).collect();
    let own_sels: Vec<Var> = (0..hyps.len()).map(sel).collect();
    let inclusion = strict_subset_piece(&mut strict, &smaller_sels, &own_sels);
    inclusion.assert_into(&mut strict);
    let comparison_aux: Vec<Var> = (before + 1..=strict.num_vars()).map(Var::new).collect();
    let not_smaller = asm.complement(&strict);

    let mut second = asm.sub();
    for (_, c) in p.theory.clauses() {
        second
            .add_clause(c.literals.iter().map(|&l| shift(l, 2 * hc + 2 * n)).collect())
            .expect("shifted theory clause is well-formed");
    }
    for (j, &hv) in hyps.iter().enumerate() {
        second
            .add_clause(vec![Lit::neg(sel2(j)), Lit::pos(x2(hv))])
            .expect("assumption clause is well-formed");
    }
    let smaller_unsupported = asm.complement(&second);

    let mut smaller_refuted = Piece::new();
    for (_, c) in p.theory.clauses() {
        smaller_refuted.require(c.literals.iter().map(|&l| shift(l, 2 * hc + 3 * n)).collect());
    }
    for (j, &hv) in hyps.iter().enumerate() {
        smaller_refuted.require(vec![Lit::neg(sel2(j)), Lit::pos(x3(hv))]);
    }
    smaller_refuted.require(mans.iter().map(|&m| Lit::neg(x3(m))).collect());

    asm.select_one(&[not_smaller, smaller_unsupported, smaller_refuted]);

    let outer: Vec<Var> = (1..=hc + n).map(Var::new).collect();
    let mut middle: Vec<Var> = (hc + n + 1..=hc + 2 * n).map(Var::new).collect();
    middle.extend(smaller_sels);
    middle.extend((2 * hc + 2 * n + 1..=2 * hc + 3 * n).map(Var::new));
    middle.extend(comparison_aux);
    asm.into_exists_forall_exists(outer, middle)
}

/// Decides a ⊆-minimal abduction query.
pub fn abduction_subset(p: &PapInstance, query: SubsetQuery) -> Result<bool, ProblemError> {
    match query {
        SubsetQuery::SubsetRelevance(h) => {
            p.hypothesis_index(h)?;
            Ok(chen_solve(&minimal_solution_qbf(p, h, true)))
        }
        SubsetQuery::SubsetNecessity(h) => {
            p.hypothesis_index(h)?;
            Ok(!chen_solve(&minimal_solution_qbf(p, h, false)))
        }
    }
}

/// All solutions of an instance, by exhaustive subset enumeration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PapSolutions {
    /// Every solution, ascending by selector bitmask.
    pub solutions: Vec<BTreeSet<Var>>,
    /// The ⊆-minimal solutions, in the same order.
    pub minimal: Vec<BTreeSet<Var>>,
}

/// Enumerates all (and all ⊆-minimal) solutions. Instances beyond
/// [`PAP_HYPOTHESIS_CAP`] hypotheses or [`PAP_VARIABLE_CAP`] variables are
/// rejected.
pub fn pap_oracle(p: &PapInstance) -> Result<PapSolutions, ProblemError> {
    let h = p.hypotheses.len();
    if h > PAP_HYPOTHESIS_CAP {
        return Err(ProblemError::CapExceeded {
            size: h,
            cap: PAP_HYPOTHESIS_CAP,
        });
    }
    let n = p.theory.num_vars() as usize;
    if n > PAP_VARIABLE_CAP {
        return Err(ProblemError::CapExceeded {
            size: n,
            cap: PAP_VARIABLE_CAP,
        });
    }
    let mut masks: Vec<u32> = Vec::new();
    for mask in 0..1u32 << h {
        let units: Vec<(Var, bool)> = (0..h)
            .filter(|&j| mask >> j & 1 == 1)
            .map(|j| (p.hypotheses[j], true))
            .collect();
        if !satisfiable_with(&p.theory, &units) {
            continue;
        }
        let entails = p.manifestations.iter().all(|&m| {
            if units.iter().any(|&(v, _)| v == m) {
                return true;
            }
            let mut assume = units.clone();
            assume.push((m, false));
            !satisfiable_with(&p.theory, &assume)
        });
        if entails {
            masks.push(mask);
        }
    }
    let to_set = |mask: u32| -> BTreeSet<Var> {
        (0..h)
            .filter(|&j| mask >> j & 1 == 1)
            .map(|j| p.hypotheses[j])
            .collect()
    };
    let minimal: Vec<BTreeSet<Var>> = masks
        .iter()
        .copied()
        .filter(|&m| !masks.iter().any(|&o| o & m == o && o != m))
        .map(to_set)
        .collect();
    Ok(PapSolutions {
        solutions: masks.into_iter().map(to_set).collect(),
        minimal,
    })
}

pub(super) fn parse_var_list(tokens: &[&str], n: u32) -> Result<Vec<Var>, ProblemError> {
    let mut out = Vec::new();
    let mut terminated = false;
    for &t in tokens {
        if terminated {
            return Err(ProblemError::Format(format!(
                "trailing token `{t}` after the closing 0"
            )));
        }
        let value: u32 = t
            .parse()
            .map_err(|_| ProblemError::Format(format!("bad variable token `{t}`")))?;
        if value == 0 {
            terminated = true;
        } else if value > n {
            return Err(ProblemError::VarOutOfRange(value));
        } else {
            out.push(Var::new(value));
        }
    }
    if !terminated {
        return Err(ProblemError::Format(
            "variable list must end with 0".to_string(),
        ));
    }
    Ok(out)
}

/// Reads an abduction instance: a DIMACS body for the theory plus the
/// header comments `c pap h <vars> 0` and `c pap m <vars> 0` naming the
/// hypotheses and manifestations. Both headers are required exactly once;
/// other comments are kept with the theory.
pub fn parse_pap(input: &str) -> Result<PapInstance, ProblemError> {
    let parsed = parse_dimacs(input)?;
    let mut theory = CnfFormula::new(parsed.num_vars());
    for (_, c) in parsed.clauses() {
        theory
            .add_clause(c.literals.clone())
            .expect("reparsed clause is well-formed");
    }
    let mut hyps: Option<Vec<Var>> = None;
    let mut mans: Option<Vec<Var>> = None;
    for comment in parsed.comments() {
        let tokens: Vec<&str> = comment.split_whitespace().collect();
        match tokens.as_slice() {
            ["pap", "h", rest @ ..] => {
                if hyps.is_some() {
                    return Err(ProblemError::Format("duplicate `pap h` header".to_string()));
                }
                hyps = Some(parse_var_list(rest, parsed.num_vars())?);
            }
            ["pap", "m", rest @ ..] => {
                if mans.is_some() {
                    return Err(ProblemError::Format("duplicate `pap m` header".to_string()));
                }
                mans = Some(parse_var_list(rest, parsed.num_vars())?);
            }
            ["pap", ..] => {
                return Err(ProblemError::Format(format!(
                    "unrecognized header `c{comment}`"
                )));
            }
            _ => theory.push_comment(comment.clone()),
        }
    }
    let hyps = hyps.ok_or_else(|| ProblemError::Format("missing `c pap h` header".to_string()))?;
    let mans = mans.ok_or_else(|| ProblemError::Format("missing `c pap m` header".to_string()))?;
    PapInstance::new(theory, hyps, mans)
}

pub(super) fn var_list(vars: &[Var]) -> String {
    let mut out = String::new();
    for v in vars {
        out.push_str(&format!(" {}", v.get()));
    }
    out.push_str(" 0");
    out
}

/// Writes an instance in the format accepted by [`parse_pap`].
pub fn write_pap(p: &PapInstance) -> String {
    let mut out = CnfFormula::new(p.theory.num_vars());
    out.push_comment(format!(" pap h{}", var_list(&p.hypotheses)));
    out.push_comment(format!(" pap m{}", var_list(&p.manifestations)));
    for comment in p.theory.comments() {
        out.push_comment(comment.clone());
    }
    for (_, c) in p.theory.clauses() {
        out.add_clause(c.literals.clone())
            .expect("copied clause is well-formed");
    }
    write_dimacs(&out, true)
}

fn split_exists_forall(q: &QbfFormula) -> Result<(Vec<Var>, Vec<Var>), String> {
    let blocks = q.prefix();
    match blocks {
        [] => Ok((Vec::new(), Vec::new())),
        [b] => match b.quantifier {
            Quantifier::Exists => Ok((b.vars.clone(), Vec::new())),
            Quantifier::Forall => Ok((Vec::new(), b.vars.clone())),
        },
        [e, a] if matches!(e.quantifier, Quantifier::Exists)
            && matches!(a.quantifier, Quantifier::Forall) =>
        {
            Ok((e.vars.clone(), a.vars.clone()))
        }
        [_, _] => Err("the two-block prefix must be existential-then-universal".to_string()),
        _ => Err(format!(
            "a {}-block prefix has more than two levels",
            blocks.len()
        )),
    }
}

/// Builds an abduction instance whose solvability equals the value of the
/// given ∃∀ formula. Each outer variable gets a complementary hypothesis
/// pair, a fresh success indicator must be entailed alongside all inner
/// variables, and the matrix enters through the negation of "matrix holds
/// yet success fails", so hypotheses explain the manifestations exactly
/// when their assignment makes the matrix hold for every inner assignment.
pub fn generate_pap_from_qbf(q: &QbfFormula) -> Result<PapInstance, ProblemError> {
    let (xs, ys) = split_exists_forall(q).map_err(ProblemError::UnsupportedPrefix)?;
    let f = q.matrix();
    let n = f.num_vars();
    let xc = xs.len() as u32;
    let success = Var::new(n + xc + 1);

    // "the matrix holds yet success fails (or misses an inner variable)"
    let mut blocked = CnfFormula::new(n + xc + 1);
    for (_, c) in f.clauses() {
        blocked
            .add_clause(c.literals.clone())
            .expect("copied clause is well-formed");
    }
    let mut miss = vec![Lit::neg(success)];
    miss.extend(ys.iter().map(|&y| Lit::neg(y)));
    blocked
        .add_clause(miss)
        .expect("indicator clause is well-formed");
    let strategy = pick_strategy(blocked.num_vars() as usize + blocked.num_clauses());
    let d = decompose(&incidence_graph(&blocked), strategy);
    let cert = negate_projection(&blocked, &d);

    let mut theory = CnfFormula::new(cert.target.num_vars());
    for (_, c) in cert.target.clauses() {
        theory
            .add_clause(c.literals.clone())
            .expect("copied clause is well-formed");
    }
    for (idx, &xv) in xs.iter().enumerate() {
        let paired = Var::new(n + idx as u32 + 1);
        theory
            .add_clause(vec![Lit::pos(xv), Lit::pos(paired)])
            .expect("pairing clause is well-formed");
        theory
            .add_clause(vec![Lit::neg(xv), Lit::neg(paired)])
            .expect("pairing clause is well-formed");
    }
    for &y in &ys {
        theory
            .add_clause(vec![Lit::neg(success), Lit::pos(y)])
            .expect("indicator clause is well-formed");
    }
    let mut hyps: Vec<Var> = xs.clone();
    hyps.extend((0..xs.len()).map(|i| Var::new(n + i as u32 + 1)));
    let mut mans: Vec<Var> = ys.clone();
    mans.push(success);
    PapInstance::new(theory, hyps, mans)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qbf::{brute_force_eval, QuantifierBlock};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn theory(n: u32, clauses: &[&[i32]]) -> CnfFormula {
        let mut f = CnfFormula::new(n);
        for c in clauses {
            f.add_clause(c.iter().map(|&l| Lit::from_dimacs(l as i64)).collect())
                .unwrap();
        }
        f
    }

    fn vars(ids: &[u32]) -> Vec<Var> {
        ids.iter().map(|&v| Var::new(v)).collect()
    }

    // model-level necessity: every model of the theory plus any solution
    // makes h true
    fn oracle_necessity(p: &PapInstance, h: Var) -> bool {
        pap_oracle(p).unwrap().solutions.iter().all(|s| {
            if s.contains(&h) {
                return true;
            }
            let mut assume: Vec<(Var, bool)> = s.iter().map(|&v| (v, true)).collect();
            assume.push((h, false));
            !satisfiable_with(p.theory(), &assume)
        })
    }

    #[test]
    fn entailed_manifestation_worked_example() {
        // theory (m) over h=1, m=2: the empty set already explains m
        let p = PapInstance::new(theory(2, &[&[2]]), vars(&[1]), vars(&[2])).unwrap();
        assert!(abduction(&p, AbductionQuery::Solvable).unwrap());
        assert!(abduction(&p, AbductionQuery::Relevance(Var::new(1))).unwrap());
        assert!(!abduction(&p, AbductionQuery::Necessity(Var::new(1))).unwrap());
        let sols = pap_oracle(&p).unwrap();
        assert_eq!(sols.solutions.len(), 2); // {} and {h}
        assert_eq!(sols.minimal, vec![BTreeSet::new()]);
    }

    #[test]
    fn entailed_hypothesis_worked_example() {
        // theory (¬h ∨ m) ∧ (h): h holds in every model of every solution
        let p = PapInstance::new(theory(2, &[&[-1, 2], &[1]]), vars(&[1]), vars(&[2])).unwrap();
        assert!(abduction(&p, AbductionQuery::Solvable).unwrap());
        assert!(abduction(&p, AbductionQuery::Necessity(Var::new(1))).unwrap());
        assert!(oracle_necessity(&p, Var::new(1)));
    }

    #[test]
    fn minimal_solution_worked_examples() {
        // theory (m): the empty set is the unique minimal solution
        let p = PapInstance::new(theory(2, &[&[2]]), vars(&[1]), vars(&[2])).unwrap();
        assert!(!abduction_subset(&p, SubsetQuery::SubsetRelevance(Var::new(1))).unwrap());
        assert!(!abduction_subset(&p, SubsetQuery::SubsetNecessity(Var::new(1))).unwrap());

        // theory (¬h ∨ m): {h} is the unique minimal solution
        let p = PapInstance::new(theory(2, &[&[-1, 2]]), vars(&[1]), vars(&[2])).unwrap();
        assert!(abduction_subset(&p, SubsetQuery::SubsetRelevance(Var::new(1))).unwrap());
        assert!(abduction_subset(&p, SubsetQuery::SubsetNecessity(Var::new(1))).unwrap());
        assert_eq!(
            pap_oracle(&p).unwrap().minimal,
            vec![BTreeSet::from([Var::new(1)])]
        );
    }

    #[test]
    fn degenerate_instances() {
        // inconsistent theory: nothing is solvable
        let p = PapInstance::new(theory(1, &[&[1], &[-1]]), vars(&[1]), Vec::new()).unwrap();
        assert!(!abduction(&p, AbductionQuery::Solvable).unwrap());
        // necessity is vacuous without solutions
        assert!(abduction(&p, AbductionQuery::Necessity(Var::new(1))).unwrap());
        assert!(abduction_subset(&p, SubsetQuery::SubsetNecessity(Var::new(1))).unwrap());
        assert!(!abduction_subset(&p, SubsetQuery::SubsetRelevance(Var::new(1))).unwrap());

        // no manifestations: a consistent theory is already explained
        let p = PapInstance::new(theory(1, &[&[1]]), Vec::new(), Vec::new()).unwrap();
        assert!(abduction(&p, AbductionQuery::Solvable).unwrap());

        // no hypotheses: solvable exactly when the theory entails the
        // manifestations on its own
        let p = PapInstance::new(theory(2, &[&[1], &[-1, 2]]), Vec::new(), vars(&[2])).unwrap();
        assert!(abduction(&p, AbductionQuery::Solvable).unwrap());
        let p = PapInstance::new(theory(2, &[&[1]]), Vec::new(), vars(&[2])).unwrap();
        assert!(!abduction(&p, AbductionQuery::Solvable).unwrap());
    }

    #[test]
    fn queries_must_name_hypotheses() {
        let p = PapInstance::new(theory(2, &[&[2]]), vars(&[1]), vars(&[2])).unwrap();
        assert!(matches!(
            abduction(&p, AbductionQuery::Relevance(Var::new(2))),
            Err(ProblemError::NotAHypothesis(2))
        ));
        assert!(matches!(
            abduction_subset(&p, SubsetQuery::SubsetNecessity(Var::new(2))),
            Err(ProblemError::NotAHypothesis(2))
        ));
        assert!(matches!(
            PapInstance::new(theory(1, &[]), vars(&[2]), Vec::new()),
            Err(ProblemError::VarOutOfRange(2))
        ));
    }

    #[test]
    fn oracle_rejects_oversized_instances() {
        let p = PapInstance::new(
            theory(15, &[]),
            (1..=15).map(Var::new).collect(),
            Vec::new(),
        )
        .unwrap();
        assert!(matches!(
            pap_oracle(&p),
            Err(ProblemError::CapExceeded { cap: PAP_HYPOTHESIS_CAP, .. })
        ));
    }

    fn random_instance(rng: &mut StdRng) -> PapInstance {
        let n = rng.gen_range(2..=5u32);
        let mut f = CnfFormula::new(n);
        for _ in 0..rng.gen_range(1..=4) {
            loop {
                let arity = rng.gen_range(1..=3.min(n));
                let lits: Vec<Lit> = (0..arity)
                    .map(|_| {
                        let v = Var::new(rng.gen_range(1..=n));
                        if rng.gen_bool(0.5) {
                            Lit::pos(v)
                        } else {
                            Lit::neg(v)
                        }
                    })
                    .collect();
                if f.add_clause(lits).is_ok() {
                    break;
                }
            }
        }
        let hyps: Vec<Var> = (1..=n).filter(|_| rng.gen_bool(0.5)).map(Var::new).collect();
        let mans: Vec<Var> = (1..=n).filter(|_| rng.gen_bool(0.4)).map(Var::new).collect();
        PapInstance::new(f, hyps, mans).unwrap()
    }

    #[test]
    fn random_instances_agree_with_the_oracle() {
        let mut rng = StdRng::seed_from_u64(0xab01);
        for _ in 0..20 {
            let p = random_instance(&mut rng);
            let sols = pap_oracle(&p).unwrap();
            assert_eq!(
                abduction(&p, AbductionQuery::Solvable).unwrap(),
                !sols.solutions.is_empty(),
                "solvability mismatch on {p:?}"
            );
            for &h in p.hypotheses() {
                assert_eq!(
                    abduction(&p, AbductionQuery::Relevance(h)).unwrap(),
                    sols.solutions.iter().any(|s| s.contains(&h)),
                    "relevance mismatch on {p:?} at {h:?}"
                );
                assert_eq!(
                    abduction(&p, AbductionQuery::Necessity(h)).unwrap(),
                    oracle_necessity(&p, h),
                    "necessity mismatch on {p:?} at {h:?}"
                );
                assert_eq!(
                    abduction_subset(&p, SubsetQuery::SubsetRelevance(h)).unwrap(),
                    sols.minimal.iter().any(|s| s.contains(&h)),
                    "minimal relevance mismatch on {p:?} at {h:?}"
                );
                assert_eq!(
                    abduction_subset(&p, SubsetQuery::SubsetNecessity(h)).unwrap(),
                    sols.minimal.iter().all(|s| s.contains(&h)),
                    "minimal necessity mismatch on {p:?} at {h:?}"
                );
            }
        }
    }

    #[test]
    fn instance_format_round_trips() {
        let p = PapInstance::new(
            theory(3, &[&[-1, 3], &[2, 3]]),
            vars(&[1, 2]),
            vars(&[3]),
        )
        .unwrap();
        let text = write_pap(&p);
        assert!(text.starts_with("c pap h 1 2 0\nc pap m 3 0\n"));
        let reparsed = parse_pap(&text).unwrap();
        assert_eq!(write_pap(&reparsed), text);
        assert_eq!(reparsed.hypotheses(), p.hypotheses());
        assert_eq!(reparsed.manifestations(), p.manifestations());
    }

    #[test]
    fn instance_format_rejects_bad_headers() {
        let no_m = "c pap h 1 0\np cnf 2 1\n2 0\n";
        assert!(matches!(parse_pap(no_m), Err(ProblemError::Format(_))));
        let twice = "c pap h 1 0\nc pap h 1 0\nc pap m 2 0\np cnf 2 0\n";
        assert!(matches!(parse_pap(twice), Err(ProblemError::Format(_))));
        let unterminated = "c pap h 1\nc pap m 2 0\np cnf 2 0\n";
        assert!(matches!(parse_pap(unterminated), Err(ProblemError::Format(_))));
        let out_of_range = "c pap h 9 0\nc pap m 2 0\np cnf 2 0\n";
        assert!(matches!(
            parse_pap(out_of_range),
            Err(ProblemError::VarOutOfRange(9))
        ));
    }

    fn two_level(exists: &[u32], forall: &[u32], n: u32, clauses: &[&[i32]]) -> QbfFormula {
        let f = theory(n, clauses);
        let mut blocks = Vec::new();
        if !exists.is_empty() {
            blocks.push(QuantifierBlock::exists(vars(exists)));
        }
        if !forall.is_empty() {
            blocks.push(QuantifierBlock::forall(vars(forall)));
        }
        QbfFormula::new(blocks, f).unwrap()
    }

    #[test]
    fn generator_matches_the_worked_examples() {
        // ∃x∀y (x ∨ y) is true
        let q = two_level(&[1], &[2], 2, &[&[1, 2]]);
        let p = generate_pap_from_qbf(&q).unwrap();
        assert!(abduction(&p, AbductionQuery::Solvable).unwrap());
        assert!(!pap_oracle(&p).unwrap().solutions.is_empty());

        // ∃x∀y (x ∧ y) is false
        let q = two_level(&[1], &[2], 2, &[&[1], &[2]]);
        let p = generate_pap_from_qbf(&q).unwrap();
        assert!(!abduction(&p, AbductionQuery::Solvable).unwrap());
        assert!(pap_oracle(&p).unwrap().solutions.is_empty());
    }

    #[test]
    fn generator_handles_degenerate_prefixes() {
        // purely existential: ∃x (x)
        let q = two_level(&[1], &[], 1, &[&[1]]);
        let p = generate_pap_from_qbf(&q).unwrap();
        assert!(abduction(&p, AbductionQuery::Solvable).unwrap());

        // purely universal: ∀y (y)
        let q = two_level(&[], &[1], 1, &[&[1]]);
        let p = generate_pap_from_qbf(&q).unwrap();
        assert!(!abduction(&p, AbductionQuery::Solvable).unwrap());

        // the wrong two-block order is refused
        let q = QbfFormula::new(
            vec![
                QuantifierBlock::forall(vars(&[1])),
                QuantifierBlock::exists(vars(&[2])),
            ],
            theory(2, &[&[1, 2]]),
        )
        .unwrap();
        assert!(matches!(
            generate_pap_from_qbf(&q),
            Err(ProblemError::UnsupportedPrefix(_))
        ));
    }

    #[test]
    fn random_generator_instances_round_trip() {
        let mut rng = StdRng::seed_from_u64(0xab02);
        for _ in 0..20 {
            let n = rng.gen_range(1..=3u32);
            let split = rng.gen_range(0..=n);
            let mut f = CnfFormula::new(n);
            for _ in 0..rng.gen_range(1..=3) {
                loop {
                    let arity = rng.gen_range(1..=2.min(n));
                    let lits: Vec<Lit> = (0..arity)
                        .map(|_| {
                            let v = Var::new(rng.gen_range(1..=n));
                            if rng.gen_bool(0.5) {
                                Lit::pos(v)
                            } else {
                                Lit::neg(v)
                            }
                        })
                        .collect();
                    if f.add_clause(lits).is_ok() {
                        break;
                    }
                }
            }
            let mut blocks = Vec::new();
            if split > 0 {
                blocks.push(QuantifierBlock::exists((1..=split).map(Var::new).collect()));
            }
            if split < n {
                blocks.push(QuantifierBlock::forall(
                    (split + 1..=n).map(Var::new).collect(),
                ));
            }
            let q = QbfFormula::new(blocks, f).unwrap();
            let expected = brute_force_eval(&q).unwrap();
            let p = generate_pap_from_qbf(&q).unwrap();
            assert_eq!(
                abduction(&p, AbductionQuery::Solvable).unwrap(),
                expected,
                "solver route disagrees on {q:?}"
            );
            if p.theory().num_vars() as usize <= PAP_VARIABLE_CAP {
                assert_eq!(
                    !pap_oracle(&p).unwrap().solutions.is_empty(),
                    expected,
                    "oracle disagrees on {q:?}"
                );
            }
        }
    }
}
