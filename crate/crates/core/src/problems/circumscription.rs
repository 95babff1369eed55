//! Circumscriptive entailment: a query follows from a theory when every
//! model that is minimal on the minimized variables — comparing only
//! models that agree on the fixed variables, with the varying variables
//! free — satisfies it.
//!
//! The decision route builds one ∀∃ formula over the full assignment:
//! either the assignment breaks the theory, or it satisfies the query, or
//! a renamed copy of the theory witnesses a model below it. An exhaustive
//! model-enumeration oracle cross-validates the route on small instances.

use super::assemble::{split_forall_exists, Assembly};
use super::ProblemError;
use crate::cnf::{parse_dimacs, write_dimacs, CnfFormula, Lit, Var};
use crate::qbf::{chen_solve, QbfFormula};
use crate::transform::reify::Piece;

/// Largest variable universe the exhaustive oracle accepts.
pub const CIRC_ORACLE_CAP: usize = 22;

/// A circumscription instance: theory, query, and a partition of the
/// shared variable universe into minimized, fixed, and varying variables.
#[derive(Debug, Clone)]
pub struct CircumscriptionInstance {
    theory: CnfFormula,
    query: CnfFormula,
    minimized: Vec<Var>,
    fixed: Vec<Var>,
    varying: Vec<Var>,
}

impl CircumscriptionInstance {
    /// Builds an instance. The theory and query are padded to a common
    /// universe, and the three variable lists must partition it exactly.
    pub fn new(
        mut theory: CnfFormula,
        mut query: CnfFormula,
        mut minimized: Vec<Var>,
        mut fixed: Vec<Var>,
        mut varying: Vec<Var>,
    ) -> Result<Self, ProblemError> {
        while theory.num_vars() < query.num_vars() {
            theory.fresh_var();
        }
        while query.num_vars() < theory.num_vars() {
            query.fresh_var();
        }
        let n = theory.num_vars();
        for list in [&mut minimized, &mut fixed, &mut varying] {
            list.sort_unstable();
        }
        let mut seen = vec![false; n as usize + 1];
        for &v in minimized.iter().chain(fixed.iter()).chain(varying.iter()) {
            if v.get() > n {
                return Err(ProblemError::VarOutOfRange(v.get()));
            }
            if seen[v.get() as usize] {
                return Err(ProblemError::InvalidPartition(format!(
                    "variable {} is listed twice",
                    v.get()
                )));
            }
            seen[v.get() as usize] = true;
        }
        if let Some(missing) = (1..=n).find(|&v| !seen[v as usize]) {
            return Err(ProblemError::InvalidPartition(format!(
                "variable {missing} is in no part"
            )));
        }
        Ok(Self {
            theory,
            query,
            minimized,
            fixed,
            varying,
        })
    }

    pub fn theory(&self) -> &CnfFormula {
        &self.theory
    }

    pub fn query(&self) -> &CnfFormula {
        &self.query
    }

    pub fn minimized(&self) -> &[Var] {
        &self.minimized
    }

    pub fn fixed(&self) -> &[Var] {
        &self.fixed
    }

    pub fn varying(&self) -> &[Var] {
        &self.varying
    }
}

/// Does the query hold in every minimal model of the theory?
pub fn circumscription_entails(inst: &CircumscriptionInstance) -> bool {
    let n = inst.theory.num_vars();
    let pc = inst.minimized.len() as u32;
    let zc = inst.varying.len() as u32;
    let p_slot: Vec<Var> = (0..pc).map(|i| Var::new(n + i + 1)).collect();
    let z_slot: Vec<Var> = (0..zc).map(|j| Var::new(n + pc + j + 1)).collect();
    // renaming for the comparison copy: minimized and varying variables
    // move to fresh slots, fixed variables stay shared
    let mut image: Vec<Var> = (1..=n).map(Var::new).collect();
    for (i, &p) in inst.minimized.iter().enumerate() {
        image[p.index()] = p_slot[i];
    }
    for (j, &z) in inst.varying.iter().enumerate() {
        image[z.index()] = z_slot[j];
    }

    let mut asm = Assembly::new(n + pc + zc);
    let mut t = asm.sub();
    for (_, c) in inst.theory.clauses() {
        t.add_clause(c.literals.clone())
            .expect("copied theory clause is well-formed");
    }
    let broken = asm.complement(&t);
    let mut satisfies = Piece::new();
    for (_, c) in inst.query.clauses() {
        satisfies.require(c.literals.clone());
    }
    let mut smaller = Piece::new();
    for (_, c) in inst.theory.clauses() {
        smaller.require(
            c.literals
                .iter()
                .map(|&l| {
                    let v = image[l.var().index()];
                    if l.is_positive() {
                        Lit::pos(v)
                    } else {
                        Lit::neg(v)
                    }
                })
                .collect(),
        );
    }
    smaller.merge(asm.strict_subset(&p_slot, &inst.minimized));
    asm.select_one(&[broken, satisfies, smaller]);
    chen_solve(&asm.into_forall_exists((1..=n).map(Var::new).collect()))
}

/// All minimal models of the theory (assignments indexed by variable,
/// ascending by bitmask), by exhaustive enumeration. Instances beyond
/// [`CIRC_ORACLE_CAP`] variables are rejected.
pub fn circ_oracle(inst: &CircumscriptionInstance) -> Result<Vec<Vec<bool>>, ProblemError> {
    let n = inst.theory.num_vars() as usize;
    if n > CIRC_ORACLE_CAP {
        return Err(ProblemError::CapExceeded {
            size: n,
            cap: CIRC_ORACLE_CAP,
        });
    }
    let p_mask: u32 = inst.minimized.iter().map(|v| 1 << v.index()).sum();
    let q_mask: u32 = inst.fixed.iter().map(|v| 1 << v.index()).sum();
    let models: Vec<u32> = (0..1u64 << n)
        .map(|m| m as u32)
        .filter(|&m| {
            let assignment: Vec<bool> = (0..n).map(|i| m >> i & 1 == 1).collect();
            inst.theory.evaluate(&assignment)
        })
        .collect();
    Ok(models
        .iter()
        .copied()
        .filter(|&m| {
            !models.iter().any(|&o| {
                o & q_mask == m & q_mask && o & p_mask & !(m & p_mask) == 0 && o & p_mask != m & p_mask
            })
        })
        .map(|m| (0..n).map(|i| m >> i & 1 == 1).collect())
        .collect())
}

/// Reads a circumscription instance: one DIMACS body holding the theory
/// followed by the query clauses, with headers `c circ p <vars> 0`,
/// `c circ q <vars> 0`, `c circ z <vars> 0` naming the partition and
/// `c circ query <j>` giving the 1-based index of the first query clause
/// (one past the end when the query is empty). All four headers are
/// required; other comments are kept with the theory.
pub fn parse_circ(input: &str) -> Result<CircumscriptionInstance, ProblemError> {
    let parsed = parse_dimacs(input)?;
    let n = parsed.num_vars();
    let m = parsed.num_clauses();
    let mut minimized: Option<Vec<Var>> = None;
    let mut fixed: Option<Vec<Var>> = None;
    let mut varying: Option<Vec<Var>> = None;
    let mut split: Option<usize> = None;
    let mut comments: Vec<String> = Vec::new();
    for comment in parsed.comments() {
        let tokens: Vec<&str> = comment.split_whitespace().collect();
        match tokens.as_slice() {
            ["circ", "p", rest @ ..] => {
                if minimized.is_some() {
                    return Err(ProblemError::Format("duplicate `circ p` header".to_string()));
                }
                minimized = Some(super::abduction::parse_var_list(rest, n)?);
            }
            ["circ", "q", rest @ ..] => {
                if fixed.is_some() {
                    return Err(ProblemError::Format("duplicate `circ q` header".to_string()));
                }
                fixed = Some(super::abduction::parse_var_list(rest, n)?);
            }
            ["circ", "z", rest @ ..] => {
                if varying.is_some() {
                    return Err(ProblemError::Format("duplicate `circ z` header".to_string()));
                }
                varying = Some(super::abduction::parse_var_list(rest, n)?);
            }
            ["circ", "query", j] => {
                if split.is_some() {
                    return Err(ProblemError::Format(
                        "duplicate `circ query` header".to_string(),
                    ));
                }
                let j: usize = j.parse().map_err(|_| {
                    ProblemError::Format(format!("bad query clause index `{j}`"))
                })?;
                if j < 1 || j > m + 1 {
                    return Err(ProblemError::InvalidClauseId(j));
                }
                split = Some(j);
            }
            ["circ", ..] => {
                return Err(ProblemError::Format(format!(
                    "unrecognized header `c{comment}`"
                )));
            }
            _ => comments.push(comment.clone()),
        }
    }
    let minimized =
        minimized.ok_or_else(|| ProblemError::Format("missing `c circ p` header".to_string()))?;
    let fixed =
        fixed.ok_or_else(|| ProblemError::Format("missing `c circ q` header".to_string()))?;
    let varying =
        varying.ok_or_else(|| ProblemError::Format("missing `c circ z` header".to_string()))?;
    let split =
        split.ok_or_else(|| ProblemError::Format("missing `c circ query` header".to_string()))?;
    let mut theory = CnfFormula::new(n);
    for comment in comments {
        theory.push_comment(comment);
    }
    let mut query = CnfFormula::new(n);
    for (j, c) in parsed.clauses() {
        let target = if j + 1 < split { &mut theory } else { &mut query };
        target
            .add_clause(c.literals.clone())
            .expect("reparsed clause is well-formed");
    }
    CircumscriptionInstance::new(theory, query, minimized, fixed, varying)
}

/// Writes an instance in the format accepted by [`parse_circ`].
pub fn write_circ(inst: &CircumscriptionInstance) -> String {
    let mut out = CnfFormula::new(inst.theory.num_vars());
    out.push_comment(format!(" circ p{}", super::abduction::var_list(&inst.minimized)));
    out.push_comment(format!(" circ q{}", super::abduction::var_list(&inst.fixed)));
    out.push_comment(format!(" circ z{}", super::abduction::var_list(&inst.varying)));
    out.push_comment(format!(" circ query {}", inst.theory.num_clauses() + 1));
    for comment in inst.theory.comments() {
        out.push_comment(comment.clone());
    }
    for (_, c) in inst.theory.clauses().chain(inst.query.clauses()) {
        out.add_clause(c.literals.clone())
            .expect("copied clause is well-formed");
    }
    write_dimacs(&out, true)
}

/// Builds an instance whose entailment verdict equals the value of the
/// given ∀∃ formula. Every universal variable gets a complementary twin
/// (so minimization cannot prefer either polarity), and a flag/indicator
/// pair arranges that a minimal model keeps the indicator on exactly when
/// the universal half it encodes admits no matrix-satisfying completion;
/// the query asserts the indicator is off. All variables are minimized.
pub fn generate_circ_from_qbf(
    q: &QbfFormula,
) -> Result<CircumscriptionInstance, ProblemError> {
    let (xs, ys) = split_forall_exists(q).map_err(ProblemError::UnsupportedPrefix)?;
    let f = q.matrix();
    let n = f.num_vars();
    let xc = xs.len() as u32;
    let twin: Vec<Var> = (0..xc).map(|i| Var::new(n + i + 1)).collect();
    let indicator = Var::new(n + xc + 1);
    let flag = Var::new(n + xc + 2);

    let mut theory = CnfFormula::new(n + xc + 2);
    for (i, &x) in xs.iter().enumerate() {
        theory
            .add_clause(vec![Lit::pos(x), Lit::pos(twin[i])])
            .expect("twin clause is well-formed");
        theory
            .add_clause(vec![Lit::neg(x), Lit::neg(twin[i])])
            .expect("twin clause is well-formed");
    }
    theory
        .add_clause(vec![Lit::neg(flag), Lit::pos(indicator)])
        .expect("flag clause is well-formed");
    for &y in &ys {
        theory
            .add_clause(vec![Lit::neg(flag), Lit::pos(y)])
            .expect("flag clause is well-formed");
    }
    let mut all_on = vec![Lit::pos(flag), Lit::neg(indicator)];
    all_on.extend(ys.iter().map(|&y| Lit::neg(y)));
    theory
        .add_clause(all_on)
        .expect("flag clause is well-formed");
    for (_, c) in f.clauses() {
        let mut lits = vec![Lit::pos(flag)];
        lits.extend(c.literals.iter().copied());
        theory
            .add_clause(lits)
            .expect("guarded matrix clause is well-formed");
    }
    let mut query = CnfFormula::new(n + xc + 2);
    query
        .add_clause(vec![Lit::neg(indicator)])
        .expect("query clause is well-formed");
    let minimized: Vec<Var> = (1..=n + xc + 2).map(Var::new).collect();
    CircumscriptionInstance::new(theory, query, minimized, Vec::new(), Vec::new())
}
