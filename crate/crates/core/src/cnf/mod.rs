//! CNF formulas with a mirrored occurrence index.
//!
//! Every literal occurrence is stored twice: once in the per-variable list and
//! once in the per-clause list, and each copy knows the position of its mirror.
//! Deleting an occurrence therefore costs O(1) and keeps all other positions
//! stable (slots are tombstoned, never shifted). The clause splitter walks
//! variable lists while clauses shrink under it, which is exactly the access
//! pattern this layout exists for.
//!
//! Formulas are mutated only while one transformation owns them exclusively;
//! afterwards they are shared behind plain references.

mod dimacs;
mod sat;

pub use dimacs::{parse_dimacs, write_dimacs, DimacsError};
pub(crate) use sat::{satisfiable, satisfiable_with};

use crate::graph::Graph;
use std::fmt;
use thiserror::Error;

/// 1-based propositional variable, matching DIMACS numbering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(u32);

impl Var {
    pub fn new(raw: u32) -> Self {
        assert!(raw > 0, "variables are 1-based");
        Var(raw)
    }

    pub fn get(self) -> u32 {
        self.0
    }

    /// 0-based index for dense arrays.
    pub fn index(self) -> usize {
        self.0 as usize - 1
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit {
    var: Var,
    positive: bool,
}

impl Lit {
    pub fn new(var: Var, positive: bool) -> Self {
        Lit { var, positive }
    }

    pub fn pos(var: Var) -> Self {
        Lit::new(var, true)
    }

    pub fn neg(var: Var) -> Self {
        Lit::new(var, false)
    }

    pub fn var(self) -> Var {
        self.var
    }

    pub fn is_positive(self) -> bool {
        self.positive
    }

    pub fn negated(self) -> Self {
        Lit {
            var: self.var,
            positive: !self.positive,
        }
    }

    /// Signed DIMACS form, e.g. `-3` for the negation of variable 3.
    pub fn to_dimacs(self) -> i64 {
        if self.positive {
            self.var.get() as i64
        } else {
            -(self.var.get() as i64)
        }
    }

    pub fn from_dimacs(raw: i64) -> Self {
        assert!(raw != 0);
        Lit {
            var: Var::new(raw.unsigned_abs() as u32),
            positive: raw > 0,
        }
    }

    /// Whether the literal holds under the given value of its variable.
    pub fn satisfied_by(self, value: bool) -> bool {
        self.positive == value
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

/// A disjunction of literals. The id of a clause is its position in the
/// owning formula's clause list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clause {
    pub literals: Vec<Lit>,
}

/// Occurrence entry in a per-variable list; `mirror` is the slot of the twin
/// entry in `clause_occ[clause]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VarOcc {
    pub clause: usize,
    pub positive: bool,
    mirror: usize,
}

/// Occurrence entry in a per-clause list; `mirror` is the slot of the twin
/// entry in `var_occ[var]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClauseOcc {
    pub var: Var,
    pub positive: bool,
    mirror: usize,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CnfError {
    #[error("clause contains a variable and its negation")]
    Tautology,
    #[error("variable {0} exceeds the declared variable count")]
    VarOutOfRange(u32),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CnfFormula {
    num_vars: u32,
    clauses: Vec<Clause>,
    var_occ: Vec<Vec<Option<VarOcc>>>,
    clause_occ: Vec<Vec<Option<ClauseOcc>>>,
    comments: Vec<String>,
}

impl CnfFormula {
    pub fn new(num_vars: u32) -> Self {
        CnfFormula {
            num_vars,
            clauses: Vec::new(),
            var_occ: vec![Vec::new(); num_vars as usize],
            clause_occ: Vec::new(),
            comments: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        (1..=self.num_vars).map(Var::new)
    }

    /// Grows the variable range to cover `v`.
    pub fn ensure_var(&mut self, v: Var) {
        if v.get() > self.num_vars {
            self.num_vars = v.get();
            self.var_occ.resize(self.num_vars as usize, Vec::new());
        }
    }

    /// Allocates the next unused variable index.
    pub fn fresh_var(&mut self) -> Var {
        let v = Var::new(self.num_vars + 1);
        self.ensure_var(v);
        v
    }

    pub fn comments(&self) -> &[String] {
        &self.comments
    }

    pub fn push_comment(&mut self, text: impl Into<String>) {
        self.comments.push(text.into());
    }

    /// Adds a clause. Duplicate literals are merged (keeping first positions);
    /// a clause containing both polarities of a variable is rejected.
    pub fn add_clause(&mut self, literals: Vec<Lit>) -> Result<usize, CnfError> {
        let mut seen: Vec<Lit> = Vec::with_capacity(literals.len());
        for lit in literals {
            if lit.var().get() > self.num_vars {
                return Err(CnfError::VarOutOfRange(lit.var().get()));
            }
            if seen.iter().any(|s| *s == lit.negated()) {
                return Err(CnfError::Tautology);
            }
            if !seen.contains(&lit) {
                seen.push(lit);
            }
        }
        let id = self.clauses.len();
        let mut occ_row = Vec::with_capacity(seen.len());
        for (slot, lit) in seen.iter().enumerate() {
            let mirror = self.var_occ[lit.var().index()].len();
            occ_row.push(Some(ClauseOcc {
                var: lit.var(),
                positive: lit.is_positive(),
                mirror,
            }));
            self.var_occ[lit.var().index()].push(Some(VarOcc {
                clause: id,
                positive: lit.is_positive(),
                mirror: slot,
            }));
        }
        self.clause_occ.push(occ_row);
        self.clauses.push(Clause { literals: seen });
        Ok(id)
    }

    pub fn clause(&self, id: usize) -> &Clause {
        &self.clauses[id]
    }

    pub fn clauses(&self) -> impl Iterator<Item = (usize, &Clause)> {
        self.clauses.iter().enumerate()
    }

    /// Live occurrences of a variable: (slot, clause id, polarity).
    pub fn var_occurrences(&self, v: Var) -> impl Iterator<Item = (usize, usize, bool)> + '_ {
        self.var_occ[v.index()]
            .iter()
            .enumerate()
            .filter_map(|(slot, e)| e.as_ref().map(|e| (slot, e.clause, e.positive)))
    }

    /// Live literals still attached to a clause, in original clause order.
    pub fn clause_live_literals(&self, clause: usize) -> impl Iterator<Item = Lit> + '_ {
        self.clause_occ[clause]
            .iter()
            .filter_map(|e| e.as_ref().map(|e| Lit::new(e.var, e.positive)))
    }

    pub fn clause_live_len(&self, clause: usize) -> usize {
        self.clause_occ[clause].iter().filter(|e| e.is_some()).count()
    }

    /// Deletes the occurrence at `slot` of variable `v` together with its
    /// mirror entry. Panics if the slot is already dead.
    pub fn delete_var_occurrence(&mut self, v: Var, slot: usize) {
        let entry = self.var_occ[v.index()][slot]
            .take()
            .expect("occurrence already deleted");
        let twin = self.clause_occ[entry.clause][entry.mirror]
            .take()
            .expect("mirror occurrence already deleted");
        debug_assert_eq!(twin.var, v);
        debug_assert_eq!(twin.mirror, slot);
    }

    /// Checks that every live entry's mirror points back at it.
    pub fn mirrors_consistent(&self) -> bool {
        for (vi, row) in self.var_occ.iter().enumerate() {
            for (slot, entry) in row.iter().enumerate() {
                if let Some(e) = entry {
                    match self.clause_occ[e.clause].get(e.mirror).and_then(|x| x.as_ref()) {
                        Some(t) => {
                            if t.var.index() != vi || t.mirror != slot || t.positive != e.positive {
                                return false;
                            }
                        }
                        None => return false,
                    }
                }
            }
        }
        for (cid, row) in self.clause_occ.iter().enumerate() {
            for (slot, entry) in row.iter().enumerate() {
                if let Some(e) = entry {
                    match self.var_occ[e.var.index()].get(e.mirror).and_then(|x| x.as_ref()) {
                        Some(t) => {
                            if t.clause != cid || t.mirror != slot || t.positive != e.positive {
                                return false;
                            }
                        }
                        None => return false,
                    }
                }
            }
        }
        true
    }

    /// Evaluates the formula under a total assignment indexed by `Var::index`.
    pub fn evaluate(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|c| {
            c.literals
                .iter()
                .any(|l| l.satisfied_by(assignment[l.var().index()]))
        })
    }
}

/// Variable co-occurrence graph: vertices are the variables, with an edge
/// whenever two distinct variables share a clause.
pub fn primal_graph(f: &CnfFormula) -> Graph {
    let mut edges = Vec::new();
    for (_, clause) in f.clauses() {
        for (i, a) in clause.literals.iter().enumerate() {
            for b in &clause.literals[i + 1..] {
                if a.var() != b.var() {
                    edges.push((a.var().get(), b.var().get()));
                }
            }
        }
    }
    Graph::from_edges(f.num_vars() as usize, edges)
}

/// Bipartite variable/clause graph. Variable `v` keeps vertex id `v`; clause
/// `j` (0-based) becomes vertex `num_vars + 1 + j`.
pub fn incidence_graph(f: &CnfFormula) -> Graph {
    let n = f.num_vars() as usize;
    let mut edges = Vec::new();
    for (id, clause) in f.clauses() {
        let cv = incidence_clause_vertex(f, id);
        for lit in &clause.literals {
            edges.push((lit.var().get(), cv));
        }
    }
    Graph::from_edges(n + f.num_clauses(), edges)
}

pub fn incidence_clause_vertex(f: &CnfFormula, clause: usize) -> u32 {
    f.num_vars() + 1 + clause as u32
}

/// What an incidence-graph vertex id stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IncidenceVertex {
    Variable(Var),
    Clause(usize),
}

pub fn incidence_vertex_kind(f: &CnfFormula, vertex: u32) -> IncidenceVertex {
    if vertex <= f.num_vars() {
        IncidenceVertex::Variable(Var::new(vertex))
    } else {
        IncidenceVertex::Clause((vertex - f.num_vars() - 1) as usize)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn worked_example() -> CnfFormula {
        // (-x or z) and (x or y or -w) and (-z or w) with x=1 y=2 z=3 w=4
        parse_dimacs("p cnf 4 3\n-1 3 0\n1 2 -4 0\n-3 4 0\n").unwrap()
    }

    #[test]
    fn duplicate_literals_merge() {
        let mut f = CnfFormula::new(3);
        let id = f
            .add_clause(vec![
                Lit::from_dimacs(1),
                Lit::from_dimacs(-2),
                Lit::from_dimacs(1),
            ])
            .unwrap();
        assert_eq!(f.clause(id).literals.len(), 2);
    }

    #[test]
    fn tautology_rejected() {
        let mut f = CnfFormula::new(2);
        assert_eq!(
            f.add_clause(vec![Lit::from_dimacs(1), Lit::from_dimacs(-1)]),
            Err(CnfError::Tautology)
        );
    }

    #[test]
    fn primal_graph_of_worked_example() {
        let f = worked_example();
        let g = primal_graph(&f);
        assert_eq!(g.num_vertices(), 4);
        let mut edges = g.edges();
        edges.sort();
        assert_eq!(edges, vec![(1, 2), (1, 3), (1, 4), (2, 4), (3, 4)]);
    }

    #[test]
    fn incidence_graph_of_worked_example() {
        let f = worked_example();
        let g = incidence_graph(&f);
        assert_eq!(g.num_vertices(), 7);
        assert_eq!(g.num_edges(), 7);
        // clause 1 = (x or y or -w) touches variables 1, 2, 4
        let cv = incidence_clause_vertex(&f, 1);
        assert_eq!(cv, 6);
        assert_eq!(g.neighbors(cv), &[1, 2, 4]);
        assert_eq!(
            incidence_vertex_kind(&f, 6),
            IncidenceVertex::Clause(1)
        );
        assert_eq!(
            incidence_vertex_kind(&f, 3),
            IncidenceVertex::Variable(Var::new(3))
        );
    }

    #[test]
    fn incidence_edge_count_is_total_literal_count() {
        let f = worked_example();
        let total: usize = f.clauses().map(|(_, c)| c.literals.len()).sum();
        assert_eq!(incidence_graph(&f).num_edges(), total);
    }

    #[test]
    fn occurrence_deletion_keeps_mirrors() {
        let mut f = worked_example();
        assert!(f.mirrors_consistent());
        // delete x from clause 1 via the variable side
        let (slot, clause, _) = f
            .var_occurrences(Var::new(1))
            .find(|&(_, c, _)| c == 1)
            .unwrap();
        f.delete_var_occurrence(Var::new(1), slot);
        assert!(f.mirrors_consistent());
        let left: Vec<i64> = f.clause_live_literals(1).map(|l| l.to_dimacs()).collect();
        assert_eq!(left, vec![2, -4]);
        assert_eq!(f.clause_live_len(clause), 2);
        // the stored clause itself is untouched
        assert_eq!(f.clause(1).literals.len(), 3);
    }
}
