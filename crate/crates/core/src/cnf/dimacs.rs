//! DIMACS CNF reading and writing.
//!
//! Parsing is token based, so clauses may span lines, but every error names
//! the line it was detected on. Comment lines are kept (everything after the
//! leading `c`), and the writer can replay them so that parse/emit reaches a
//! fixpoint after one pass.

use super::{CnfError, CnfFormula, Lit};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DimacsError {
    #[error("line {line}: expected `p cnf <vars> <clauses>` header, found {found:?}")]
    MalformedHeader { line: usize, found: String },
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
}

pub fn parse_dimacs(input: &str) -> Result<CnfFormula, DimacsError> {
    let mut formula: Option<CnfFormula> = None;
    let mut declared_clauses = 0usize;
    let mut comments: Vec<String> = Vec::new();
    let mut current: Vec<Lit> = Vec::new();
    let mut clause_start_line = 0usize;

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
                    return Err(DimacsError::MalformedHeader {
                        line,
                        found: raw_line.trim().to_string(),
                    })
                }
            }
        }
        let f = formula.as_mut().unwrap();
        for token in trimmed.split_whitespace() {
            let value: i64 = token.parse().map_err(|_| DimacsError::BadToken {
                line,
                token: token.to_string(),
            })?;
            if value == 0 {
                match f.add_clause(std::mem::take(&mut current)) {
                    Ok(_) => {}
                    Err(CnfError::Tautology) => {
                        return Err(DimacsError::TautologicalClause {
                            line: clause_start_line.max(line),
                        })
                    }
                    Err(CnfError::VarOutOfRange(v)) => {
                        return Err(DimacsError::LiteralOutOfRange {
                            line,
                            literal: v as i64,
                            declared: f.num_vars(),
                        })
                    }
                }
                clause_start_line = 0;
            } else {
                if value.unsigned_abs() > f.num_vars() as u64 {
                    return Err(DimacsError::LiteralOutOfRange {
                        line,
                        literal: value,
                        declared: f.num_vars(),
                    });
                }
                if current.is_empty() {
                    clause_start_line = line;
                }
                current.push(Lit::from_dimacs(value));
            }
        }
    }

    let f = formula.ok_or(DimacsError::MalformedHeader {
        line: input.lines().count().max(1),
        found: String::new(),
    })?;
    if !current.is_empty() {
        return Err(DimacsError::UnterminatedClause {
            line: clause_start_line,
        });
    }
    if f.num_clauses() != declared_clauses {
        return Err(DimacsError::ClauseCountMismatch {
            declared: declared_clauses,
            found: f.num_clauses(),
        });
    }
    // late comments (after the header) were pushed into the local buffer
    let mut f = f;
    for c in comments {
        f.push_comment(c);
    }
    Ok(f)
}

pub fn write_dimacs(f: &CnfFormula, include_comments: bool) -> String {
    let mut out = String::new();
    if include_comments {
        for c in f.comments() {
            out.push('c');
            out.push_str(c);
            out.push('\n');
        }
    }
    out.push_str(&format!("p cnf {} {}\n", f.num_vars(), f.num_clauses()));
    for (_, clause) in f.clauses() {
        for lit in &clause.literals {
            out.push_str(&lit.to_dimacs().to_string());
            out.push(' ');
        }
        out.push_str("0\n");
    }
    out
}

impl std::str::FromStr for CnfFormula {
    type Err = DimacsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_dimacs(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_worked_example() {
        let f = parse_dimacs("p cnf 4 3\n-1 3 0\n1 2 -4 0\n-3 4 0\n").unwrap();
        assert_eq!(f.num_vars(), 4);
        assert_eq!(f.num_clauses(), 3);
        assert_eq!(
            f.clause(1).literals,
            vec![Lit::from_dimacs(1), Lit::from_dimacs(2), Lit::from_dimacs(-4)]
        );
    }

    #[test]
    fn header_errors() {
        assert!(matches!(
            parse_dimacs("p dnf 3 1\n1 0\n"),
            Err(DimacsError::MalformedHeader { line: 1, .. })
        ));
        assert!(matches!(
            parse_dimacs("1 2 0\n"),
            Err(DimacsError::MalformedHeader { line: 1, .. })
        ));
    }

    #[test]
    fn literal_out_of_range() {
        assert_eq!(
            parse_dimacs("p cnf 2 1\n1 3 0\n"),
            Err(DimacsError::LiteralOutOfRange {
                line: 2,
                literal: 3,
                declared: 2
            })
        );
    }

    #[test]
    fn clause_count_mismatch() {
        assert_eq!(
            parse_dimacs("p cnf 2 2\n1 0\n"),
            Err(DimacsError::ClauseCountMismatch {
                declared: 2,
                found: 1
            })
        );
    }

    #[test]
    fn tautology_reported_with_line() {
        assert_eq!(
            parse_dimacs("p cnf 2 2\n1 2 0\n2 -2 0\n"),
            Err(DimacsError::TautologicalClause { line: 3 })
        );
    }

    #[test]
    fn multiline_clause_and_empty_clause() {
        let f = parse_dimacs("p cnf 3 2\n1 2\n3 0\n0\n").unwrap();
        assert_eq!(f.clause(0).literals.len(), 3);
        assert_eq!(f.clause(1).literals.len(), 0);
    }

    #[test]
    fn round_trip_reaches_fixpoint() {
        let src = "c  a comment\np cnf 3 2\n  1   2 0\n-3 1 1 0\n";
        let once = write_dimacs(&parse_dimacs(src).unwrap(), true);
        let twice = write_dimacs(&parse_dimacs(&once).unwrap(), true);
        assert_eq!(once, twice);
        assert_eq!(once, "c  a comment\np cnf 3 2\n1 2 0\n-3 1 0\n");
    }
}
