//! QDIMACS reading and writing: a DIMACS body preceded by `a`/`e`
//! quantifier lines. The parser insists on closed formulas and well-formed
//! prefixes; the writer emits the canonical form (merged blocks, sorted
//! variables), so parse-then-write is a fixpoint after one pass.

use super::{QbfError, QbfFormula, Quantifier, QuantifierBlock};
use crate::cnf::{CnfFormula, Lit, Var};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum QdimacsError {
    #[error("line {line}: expected `p cnf <vars> <clauses>` header, found {found:?}")]
    MalformedHeader { line: usize, found: String },
    #[error("line {line}: malformed quantifier line: {reason}")]
    MalformedPrefix { line: usize, reason: String },
    #[error("line {line}: quantifier block is empty")]
    EmptyBlock { line: usize },
    #[error("line {line}: quantifier line after the first clause")]
    PrefixAfterClauses { line: usize },
    #[error("line {line}: token {token:?} is not a literal")]
    BadToken { line: usize, token: String },
    #[error("line {line}: literal {literal} exceeds the declared {declared} variables")]
    LiteralOutOfRange {
        line: usize,
        literal: i64,
        declared: u32,
    },
    #[error("line {line}: clause contains a variable and its negation")]
    TautologicalClause { line: usize },
    #[error("declared {declared} clauses but found {found}")]
    ClauseCountMismatch { declared: usize, found: usize },
    #[error("line {line}: unterminated clause at end of input")]
    UnterminatedClause { line: usize },
    #[error(transparent)]
    Formula(#[from] QbfError),
}

pub fn parse_qdimacs(input: &str) -> Result<QbfFormula, QdimacsError> {
    use crate::cnf::CnfError;

    let mut formula: Option<CnfFormula> = None;
    let mut declared_clauses = 0usize;
    let mut comments: Vec<String> = Vec::new();
    let mut prefix: Vec<QuantifierBlock> = Vec::new();
    let mut current: Vec<Lit> = Vec::new();
    let mut clause_start_line = 0usize;
    let mut in_clauses = false;

    for (idx, raw_line) in input.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw_line.trim_start();
        if trimmed.starts_with('c') {
            comments.push(trimmed[1..].to_string());
            continue;
        }
        if trimmed.is_empty() {
            continue;
        }
        if formula.is_none() {
            let mut it = trimmed.split_whitespace();
            let ok = it.next() == Some("p") && it.next() == Some("cnf");
            let nv = it.next().and_then(|t| t.parse::<u32>().ok());
            let nc = it.next().and_then(|t| t.parse::<usize>().ok());
            match (ok, nv, nc, it.next()) {
                (true, Some(nv), Some(nc), None) => {
                    let mut f = CnfFormula::new(nv);
                    for c in comments.drain(..) {
                        f.push_comment(c);
                    }
                    formula = Some(f);
                    declared_clauses = nc;
                    continue;
                }
                _ => {
                    return Err(QdimacsError::MalformedHeader {
                        line,
                        found: raw_line.trim().to_string(),
                    })
                }
            }
        }
        let f = formula.as_mut().unwrap();
        let first = trimmed.split_whitespace().next().unwrap_or_default();
        if first == "a" || first == "e" {
            if in_clauses || !current.is_empty() {
                return Err(QdimacsError::PrefixAfterClauses { line });
            }
            let quantifier = if first == "a" {
                Quantifier::Forall
            } else {
                Quantifier::Exists
            };
            let mut vars: Vec<Var> = Vec::new();
            let mut terminated = false;
            for token in trimmed.split_whitespace().skip(1) {
                if terminated {
                    return Err(QdimacsError::MalformedPrefix {
                        line,
                        reason: format!("token {token:?} after the terminating 0"),
                    });
                }
                let value: i64 = token.parse().map_err(|_| QdimacsError::MalformedPrefix {
                    line,
                    reason: format!("token {token:?} is not a variable"),
                })?;
                match value {
                    0 => terminated = true,
                    v if v > 0 && v <= u32::MAX as i64 => vars.push(Var::new(v as u32)),
                    other => {
                        return Err(QdimacsError::MalformedPrefix {
                            line,
                            reason: format!("{other} is not a positive variable"),
                        })
                    }
                }
            }
            if !terminated {
                return Err(QdimacsError::MalformedPrefix {
                    line,
                    reason: "missing terminating 0".to_string(),
                });
            }
            if vars.is_empty() {
                return Err(QdimacsError::EmptyBlock { line });
            }
            prefix.push(QuantifierBlock { quantifier, vars });
            continue;
        }
        for token in trimmed.split_whitespace() {
            let value: i64 = token.parse().map_err(|_| QdimacsError::BadToken {
                line,
                token: token.to_string(),
            })?;
            if value == 0 {
                match f.add_clause(std::mem::take(&mut current)) {
                    Ok(_) => {}
                    Err(CnfError::Tautology) => {
                        return Err(QdimacsError::TautologicalClause {
                            line: clause_start_line.max(line),
                        })
                    }
                    Err(CnfError::VarOutOfRange(v)) => {
                        return Err(QdimacsError::LiteralOutOfRange {
                            line,
                            literal: v as i64,
                            declared: f.num_vars(),
                        })
                    }
                }
                in_clauses = true;
                clause_start_line = 0;
            } else {
                if value.unsigned_abs() > f.num_vars() as u64 {
                    return Err(QdimacsError::LiteralOutOfRange {
                        line,
                        literal: value,
                        declared: f.num_vars(),
                    });
                }
                if current.is_empty() {
                    clause_start_line = line;
                }
                in_clauses = true;
                current.push(Lit::from_dimacs(value));
            }
        }
    }

    let f = formula.ok_or(QdimacsError::MalformedHeader {
        line: input.lines().count().max(1),
        found: String::new(),
    })?;
    if !current.is_empty() {
        return Err(QdimacsError::UnterminatedClause {
            line: clause_start_line,
        });
    }
    if f.num_clauses() != declared_clauses {
        return Err(QdimacsError::ClauseCountMismatch {
            declared: declared_clauses,
            found: f.num_clauses(),
        });
    }
    let mut f = f;
    for c in comments {
        f.push_comment(c);
    }
    Ok(QbfFormula::new(prefix, f)?)
}

pub fn write_qdimacs(q: &QbfFormula) -> String {
    let f = q.matrix();
    let mut out = String::new();
    for c in f.comments() {
        out.push('c');
        out.push_str(c);
        out.push('\n');
    }
    out.push_str(&format!("p cnf {} {}\n", f.num_vars(), f.num_clauses()));
    for block in q.prefix() {
        out.push(match block.quantifier {
            Quantifier::Forall => 'a',
            Quantifier::Exists => 'e',
        });
        for v in &block.vars {
            out.push_str(&format!(" {}", v.get()));
        }
        out.push_str(" 0\n");
    }
    for (_, clause) in f.clauses() {
        for lit in &clause.literals {
            out.push_str(&lit.to_dimacs().to_string());
            out.push(' ');
        }
        out.push_str("0\n");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qbf::brute_force_eval;

    #[test]
    fn parse_worked_example() {
        let q = parse_qdimacs("p cnf 2 2\na 1 0\ne 2 0\n1 2 0\n-1 -2 0\n").unwrap();
        assert_eq!(q.num_blocks(), 2);
        assert_eq!(q.prefix()[0].quantifier, Quantifier::Forall);
        assert_eq!(q.prefix()[1].quantifier, Quantifier::Exists);
        assert_eq!(q.matrix().num_clauses(), 2);
        assert_eq!(brute_force_eval(&q), Ok(true));
    }

    #[test]
    fn single_existential_unit() {
        let q = parse_qdimacs("p cnf 1 1\ne 1 0\n1 0\n").unwrap();
        assert_eq!(brute_force_eval(&q), Ok(true));
    }

    #[test]
    fn unbound_matrix_variables_are_rejected() {
        // In range but not quantified:
        let free = parse_qdimacs("p cnf 3 1\ne 1 0\na 2 0\n3 0\n");
        assert_eq!(
            free.unwrap_err(),
            QdimacsError::Formula(QbfError::FreeVar { var: 3 })
        );
        // Out of the declared universe entirely:
        let range = parse_qdimacs("p cnf 2 1\ne 1 2 0\n3 0\n");
        assert_eq!(
            range.unwrap_err(),
            QdimacsError::LiteralOutOfRange {
                line: 3,
                literal: 3,
                declared: 2
            }
        );
    }

    #[test]
    fn prefix_shape_is_checked() {
        assert_eq!(
            parse_qdimacs("p cnf 1 1\na 0\ne 1 0\n1 0\n").unwrap_err(),
            QdimacsError::EmptyBlock { line: 2 }
        );
        assert!(matches!(
            parse_qdimacs("p cnf 1 1\ne 1\n1 0\n").unwrap_err(),
            QdimacsError::MalformedPrefix { line: 2, .. }
        ));
        assert_eq!(
            parse_qdimacs("p cnf 2 2\ne 1 0\n1 0\na 2 0\n-2 0\n").unwrap_err(),
            QdimacsError::PrefixAfterClauses { line: 4 }
        );
        assert!(matches!(
            parse_qdimacs("p cnf 2 1\ne 1 -2 0\n1 0\n").unwrap_err(),
            QdimacsError::MalformedPrefix { line: 2, .. }
        ));
    }

    #[test]
    fn write_then_parse_is_a_fixpoint() {
        // Adjacent same-quantifier blocks merge and variables sort, so the
        // second pass reproduces the first exactly.
        let text = "c a remark\np cnf 4 2\ne 2 1 0\ne 3 0\na 4 0\n1 -3 0\n4 2 0\n";
        let q = parse_qdimacs(text).unwrap();
        assert_eq!(q.num_blocks(), 2);
        let canonical = write_qdimacs(&q);
        let q2 = parse_qdimacs(&canonical).unwrap();
        assert_eq!(q, q2);
        assert_eq!(write_qdimacs(&q2), canonical);
    }

    #[test]
    fn clause_bookkeeping_matches_the_header() {
        assert_eq!(
            parse_qdimacs("p cnf 1 2\ne 1 0\n1 0\n").unwrap_err(),
            QdimacsError::ClauseCountMismatch {
                declared: 2,
                found: 1
            }
        );
        assert_eq!(
            parse_qdimacs("p cnf 1 1\ne 1 0\n1\n").unwrap_err(),
            QdimacsError::UnterminatedClause { line: 3 }
        );
    }
}
