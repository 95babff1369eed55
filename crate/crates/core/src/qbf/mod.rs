//! Quantified boolean formulas: a block prefix over a CNF matrix, QDIMACS
//! I/O, a small brute-force evaluator, and a solver that works along a tree
//! decomposition of the matrix, keeping its intermediate state as
//! bounded-scope choice constraints.

mod brute;
mod choice;
mod qdimacs;
mod relation;
mod solve;

pub use brute::{brute_force_eval, BRUTE_FORCE_CAP};
pub use choice::{forget_var, join, normalize, ChoiceConstraint, ChoiceError};
pub use qdimacs::{parse_qdimacs, write_qdimacs, QdimacsError};
pub use solve::{
    build_choice_constraints, chen_solve, chen_solve_with, Route, SolveOptions, SolveResult,
    SolveStats,
};

use crate::cnf::{CnfFormula, Var};
use crate::treedec::TreeDecomposition;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantifier {
    Exists,
    Forall,
}

impl Quantifier {
    pub fn dual(self) -> Quantifier {
        match self {
            Quantifier::Exists => Quantifier::Forall,
            Quantifier::Forall => Quantifier::Exists,
        }
    }
}

/// One maximal run of equally quantified variables in a prefix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantifierBlock {
    pub quantifier: Quantifier,
    pub vars: Vec<Var>,
}

impl QuantifierBlock {
    pub fn exists(vars: Vec<Var>) -> Self {
        QuantifierBlock {
            quantifier: Quantifier::Exists,
            vars,
        }
    }

    pub fn forall(vars: Vec<Var>) -> Self {
        QuantifierBlock {
            quantifier: Quantifier::Forall,
            vars,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QbfError {
    #[error("variable {var} is quantified more than once")]
    DuplicateVar { var: u32 },
    #[error("variable {var} occurs in the matrix but is not quantified")]
    FreeVar { var: u32 },
    #[error("variable {var} is outside the matrix universe")]
    VarOutOfRange { var: u32 },
    #[error("{vars} quantified variables exceed the brute-force cap of {cap}")]
    TooLarge { vars: usize, cap: usize },
    #[error("attached decomposition is invalid for the matrix ({violations} violations)")]
    InvalidDecomposition { violations: usize },
}

/// Which graph of the matrix an attached decomposition covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixGraph {
    Primal,
    Incidence,
}

/// A closed formula: every variable occurring in the matrix is quantified by
/// exactly one block. Blocks are kept in strict alternation (adjacent blocks
/// with the same quantifier are merged, empty blocks dropped) with each
/// block's variables sorted, so equal prefixes compare equal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QbfFormula {
    prefix: Vec<QuantifierBlock>,
    matrix: CnfFormula,
    decomposition: Option<(MatrixGraph, TreeDecomposition)>,
}

impl QbfFormula {
    pub fn new(prefix: Vec<QuantifierBlock>, matrix: CnfFormula) -> Result<Self, QbfError> {
        let mut blocks: Vec<QuantifierBlock> = Vec::new();
        for b in prefix {
            if b.vars.is_empty() {
                continue;
            }
            match blocks.last_mut() {
                Some(last) if last.quantifier == b.quantifier => last.vars.extend(b.vars),
                _ => blocks.push(b),
            }
        }
        let n = matrix.num_vars() as usize;
        let mut bound = vec![false; n + 1];
        for b in &mut blocks {
            b.vars.sort_unstable();
            for &v in &b.vars {
                let raw = v.get() as usize;
                if raw > n {
                    return Err(QbfError::VarOutOfRange { var: v.get() });
                }
                if bound[raw] {
                    return Err(QbfError::DuplicateVar { var: v.get() });
                }
                bound[raw] = true;
            }
        }
        for v in 1..=n {
            let occurs = matrix.var_occurrences(Var::new(v as u32)).next().is_some();
            if occurs && !bound[v] {
                return Err(QbfError::FreeVar { var: v as u32 });
            }
        }
        Ok(QbfFormula {
            prefix: blocks,
            matrix,
            decomposition: None,
        })
    }

    pub fn prefix(&self) -> &[QuantifierBlock] {
        &self.prefix
    }

    pub fn matrix(&self) -> &CnfFormula {
        &self.matrix
    }

    pub fn num_blocks(&self) -> usize {
        self.prefix.len()
    }

    /// The block quantifiers in prefix order.
    pub fn quantifiers(&self) -> Vec<Quantifier> {
        self.prefix.iter().map(|b| b.quantifier).collect()
    }

    /// 1-based index of the block quantifying `v`.
    pub fn block_of(&self, v: Var) -> Option<usize> {
        self.prefix
            .iter()
            .position(|b| b.vars.binary_search(&v).is_ok())
            .map(|i| i + 1)
    }

    pub fn quantified_var_count(&self) -> usize {
        self.prefix.iter().map(|b| b.vars.len()).sum()
    }

    /// Attaches a decomposition of the matrix's primal or incidence graph
    /// for the solver to use instead of computing its own. The decomposition
    /// is checked against the named graph before being accepted.
    pub fn attach_decomposition(
        &mut self,
        graph: MatrixGraph,
        d: TreeDecomposition,
    ) -> Result<(), QbfError> {
        let target = match graph {
            MatrixGraph::Primal => crate::cnf::primal_graph(&self.matrix),
            MatrixGraph::Incidence => crate::cnf::incidence_graph(&self.matrix),
        };
        let report = d.validate(&target);
        if !report.violations.is_empty() {
            return Err(QbfError::InvalidDecomposition {
                violations: report.violations.len(),
            });
        }
        self.decomposition = Some((graph, d));
        Ok(())
    }

    pub fn decomposition(&self) -> Option<(MatrixGraph, &TreeDecomposition)> {
        self.decomposition.as_ref().map(|(g, d)| (*g, d))
    }
}

/// The tower `g(0, k) = k`, `g(r+1, k) = 2^g(r, k)`, saturating at
/// `u64::MAX`. Budget telemetry only; no verdict depends on it.
pub fn growth_bound(r: u32, k: u64) -> u64 {
    let mut g = k;
    for _ in 0..r {
        if g >= 64 {
            return u64::MAX;
        }
        g = match 1u64.checked_shl(g as u32) {
            Some(v) => v,
            None => return u64::MAX,
        };
    }
    g
}
