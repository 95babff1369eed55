//! A small backtracking satisfiability check with unit propagation, used by
//! transformation tests and the brute-force problem oracles. It is not a
//! performance-oriented solver; inputs stay in the tens of variables.

use super::{CnfFormula, Var};

pub(crate) fn satisfiable(f: &CnfFormula) -> bool {
    satisfiable_with(f, &[])
}

/// Satisfiability of `f` with some variables pinned to fixed values.
pub(crate) fn satisfiable_with(f: &CnfFormula, assumptions: &[(Var, bool)]) -> bool {
    let mut assignment: Vec<Option<bool>> = vec![None; f.num_vars() as usize];
    for &(v, val) in assumptions {
        match assignment[v.index()] {
            Some(prev) if prev != val => return false,
            _ => assignment[v.index()] = Some(val),
        }
    }
    search(f, &mut assignment)
}

fn search(f: &CnfFormula, assignment: &mut Vec<Option<bool>>) -> bool {
    // Propagate unit clauses to a fixpoint, remembering what we set so the
    // caller's state can be restored on backtrack.
    let mut trail: Vec<Var> = Vec::new();
    let result = loop {
        match propagate_step(f, assignment) {
            Propagation::Conflict => break false,
            Propagation::Fixed(v, val) => {
                assignment[v.index()] = Some(val);
                trail.push(v);
            }
            Propagation::Stable { all_satisfied } => {
                if all_satisfied {
                    break true;
                }
                let v = match branch_var(f, assignment) {
                    Some(v) => v,
                    None => break true, // no unsatisfied clause mentions a free var
                };
                let mut found = false;
                for val in [true, false] {
                    assignment[v.index()] = Some(val);
                    if search(f, assignment) {
                        found = true;
                        break;
                    }
                }
                if !found {
                    assignment[v.index()] = None;
                }
                break found;
            }
        }
    };
    if !result {
        for v in trail {
            assignment[v.index()] = None;
        }
    }
    result
}

enum Propagation {
    Conflict,
    Fixed(Var, bool),
    Stable { all_satisfied: bool },
}

fn propagate_step(f: &CnfFormula, assignment: &[Option<bool>]) -> Propagation {
    let mut all_satisfied = true;
    for (_, clause) in f.clauses() {
        let mut satisfied = false;
        let mut unassigned = None;
        let mut unassigned_count = 0;
        for &lit in &clause.literals {
            match assignment[lit.var().index()] {
                Some(val) => {
                    if lit.satisfied_by(val) {
                        satisfied = true;
                        break;
                    }
                }
                None => {
                    unassigned = Some(lit);
                    unassigned_count += 1;
                }
            }
        }
        if satisfied {
            continue;
        }
        match unassigned_count {
            0 => return Propagation::Conflict,
            1 => {
                let lit = unassigned.unwrap();
                return Propagation::Fixed(lit.var(), lit.is_positive());
            }
            _ => all_satisfied = false,
        }
    }
    Propagation::Stable { all_satisfied }
}

fn branch_var(f: &CnfFormula, assignment: &[Option<bool>]) -> Option<Var> {
    for (_, clause) in f.clauses() {
        let mut satisfied = false;
        let mut candidate = None;
        for &lit in &clause.literals {
            match assignment[lit.var().index()] {
                Some(val) if lit.satisfied_by(val) => {
                    satisfied = true;
                    break;
                }
                Some(_) => {}
                None if candidate.is_none() => candidate = Some(lit.var()),
                None => {}
            }
        }
        if !satisfied {
            if let Some(v) = candidate {
                return Some(v);
            }
        }
    }
    None
}
