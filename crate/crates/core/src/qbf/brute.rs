//! Reference evaluation by recursive expansion of the prefix. Exponential in
//! the number of quantified variables, so it refuses formulas above a small
//! cap; every faster path in the crate is measured against this one.

use super::{QbfError, QbfFormula, Quantifier};

/// Most quantified variables `brute_force_eval` accepts.
pub const BRUTE_FORCE_CAP: usize = 24;

/// Evaluates the formula by trying both values of every quantified variable,
/// outermost first.
pub fn brute_force_eval(q: &QbfFormula) -> Result<bool, QbfError> {
    let vars = q.quantified_var_count();
    if vars > BRUTE_FORCE_CAP {
        return Err(QbfError::TooLarge {
            vars,
            cap: BRUTE_FORCE_CAP,
        });
    }
    let order: Vec<(u32, Quantifier)> = q
        .prefix()
        .iter()
        .flat_map(|b| b.vars.iter().map(|v| (v.get(), b.quantifier)))
        .collect();
    let mut assignment = vec![false; q.matrix().num_vars() as usize];
    Ok(expand(q, &order, &mut assignment))
}

fn expand(q: &QbfFormula, order: &[(u32, Quantifier)], assignment: &mut Vec<bool>) -> bool {
    let Some(&(var, quantifier)) = order.first() else {
        return q.matrix().evaluate(assignment);
    };
    let slot = (var - 1) as usize;
    let mut outcome = |value: bool| {
        assignment[slot] = value;
        expand(q, &order[1..], assignment)
    };
    match quantifier {
        Quantifier::Exists => outcome(false) || outcome(true),
        Quantifier::Forall => outcome(false) && outcome(true),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnf::{CnfFormula, Lit, Var};
    use crate::qbf::QuantifierBlock;

    fn formula(n: u32, clauses: &[&[i32]], prefix: Vec<QuantifierBlock>) -> QbfFormula {
        let mut f = CnfFormula::new(n);
        for c in clauses {
            let lits: Vec<Lit> = c
                .iter()
                .map(|&l| Lit::new(Var::new(l.unsigned_abs()), l > 0))
                .collect();
            f.add_clause(lits).unwrap();
        }
        QbfFormula::new(prefix, f).unwrap()
    }

    fn vars(ids: &[u32]) -> Vec<Var> {
        ids.iter().map(|&i| Var::new(i)).collect()
    }

    #[test]
    fn equivalence_needs_a_responding_witness() {
        // For every x there is a matching y, but no y matches every x.
        let clauses: &[&[i32]] = &[&[-1, 2], &[1, -2]];
        let forall_exists = formula(
            2,
            clauses,
            vec![
                QuantifierBlock::forall(vars(&[1])),
                QuantifierBlock::exists(vars(&[2])),
            ],
        );
        assert_eq!(brute_force_eval(&forall_exists), Ok(true));
        let exists_forall = formula(
            2,
            clauses,
            vec![
                QuantifierBlock::exists(vars(&[2])),
                QuantifierBlock::forall(vars(&[1])),
            ],
        );
        assert_eq!(brute_force_eval(&exists_forall), Ok(false));
    }

    #[test]
    fn conjunction_under_a_universal_fails() {
        let q = formula(
            2,
            &[&[1], &[2]],
            vec![
                QuantifierBlock::forall(vars(&[1])),
                QuantifierBlock::exists(vars(&[2])),
            ],
        );
        assert_eq!(brute_force_eval(&q), Ok(false));
    }

    #[test]
    fn the_cap_is_enforced() {
        let n = (BRUTE_FORCE_CAP + 1) as u32;
        let q = formula(
            n,
            &[&[1]],
            vec![QuantifierBlock::exists(vars(
                &(1..=n).collect::<Vec<_>>(),
            ))],
        );
        assert_eq!(
            brute_force_eval(&q),
            Err(QbfError::TooLarge {
                vars: BRUTE_FORCE_CAP + 1,
                cap: BRUTE_FORCE_CAP
            })
        );
    }

    #[test]
    fn empty_prefix_evaluates_the_closed_matrix() {
        // No variables occur; an empty clause is false, none is true.
        let empty = formula(0, &[], vec![]);
        assert_eq!(brute_force_eval(&empty), Ok(true));
        let mut f = CnfFormula::new(0);
        f.add_clause(Vec::new()).unwrap();
        let falsum = QbfFormula::new(vec![], f).unwrap();
        assert_eq!(brute_force_eval(&falsum), Ok(false));
    }
}
