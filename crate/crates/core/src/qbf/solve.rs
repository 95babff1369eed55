//! The decomposition-driven QBF solver.
//!
//! The matrix's clauses become one choice constraint each, attached to the
//! first node of a nice primal decomposition whose bag covers them. Walking
//! the tree bottom-up keeps a pool of live constraints: introduce nodes add
//! attachments, forget nodes join every constraint mentioning the forgotten
//! variable and fold it out, join nodes merge pools. Scopes never leave the
//! current bag, so constraint sizes depend on the width and the number of
//! blocks, not on the formula size. At the root everything is fully folded
//! and the verdict is the conjunction of the leftover evaluations.
//!
//! Matrices with clauses wider than the bags can afford are first rewritten
//! by the clause-splitting projection, which bounds arities by 3 while
//! keeping the incidence structure; its decomposition transfers back to a
//! primal one by expanding each clause vertex into the clause's variables.

use super::choice::{self, ChoiceConstraint, ChoiceError};
use super::relation::Relation;
use super::{QbfFormula, QuantifierBlock};
use crate::cnf::{self, CnfFormula, Var};
use crate::transform::to_3cnf;
use crate::treedec::{
    decompose, make_nice, NiceNodeKind, NiceTreeDecomposition, Strategy, TreeDecomposition,
};

/// Which graph of the matrix drives the dynamic program.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    /// Clauses fit in bags of the primal graph directly.
    Primal,
    /// Arity reduction first, then the primal route on the rewritten matrix.
    Incidence3Cnf,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SolveOptions {
    /// Force a route instead of choosing by comparing widths.
    pub route: Option<Route>,
    /// Force a decomposition heuristic instead of choosing by size.
    pub strategy: Option<Strategy>,
}

/// Counters from one solver run; all telemetry, no verdicts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveStats {
    pub route: Route,
    /// Width of the primal decomposition the walk ran on.
    pub primal_width: i64,
    pub decomposition_nodes: usize,
    pub joins: u64,
    pub forgets: u64,
    /// Tree nodes visited or created across all constraint operations.
    pub node_ops: u64,
    /// Most constraints live at once.
    pub peak_constraints: usize,
    /// Largest constraint (in tree nodes) ever held.
    pub max_constraint_nodes: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveResult {
    pub value: bool,
    pub stats: SolveStats,
}

fn trivial_stats(route: Route) -> SolveStats {
    SolveStats {
        route,
        primal_width: -1,
        decomposition_nodes: 0,
        joins: 0,
        forgets: 0,
        node_ops: 0,
        peak_constraints: 0,
        max_constraint_nodes: 0,
    }
}

/// Truth of a closed formula. Computes (or reuses) a decomposition, picks a
/// route, and runs the pool walk.
pub fn chen_solve(q: &QbfFormula) -> bool {
    chen_solve_with(q, &SolveOptions::default()).value
}

pub fn chen_solve_with(q: &QbfFormula, opts: &SolveOptions) -> SolveResult {
    let f = q.matrix();
    if f.clauses().any(|(_, c)| c.literals.is_empty()) {
        return SolveResult {
            value: false,
            stats: trivial_stats(opts.route.unwrap_or(Route::Primal)),
        };
    }
    if f.num_clauses() == 0 {
        return SolveResult {
            value: true,
            stats: trivial_stats(opts.route.unwrap_or(Route::Primal)),
        };
    }
    let strategy = opts.strategy.unwrap_or(if f.num_vars() <= 200 {
        Strategy::MinFill
    } else {
        Strategy::MinDegree
    });
    if let Some((graph, d)) = q.decomposition() {
        return match graph {
            super::MatrixGraph::Primal => run_primal(q, &make_nice(d), Route::Primal),
            super::MatrixGraph::Incidence => run_arity_reduced(q, d.clone()),
        };
    }
    match opts.route {
        Some(Route::Primal) => {
            let d = decompose(&cnf::primal_graph(f), strategy);
            run_primal(q, &make_nice(&d), Route::Primal)
        }
        Some(Route::Incidence3Cnf) => {
            let d = decompose(&cnf::incidence_graph(f), strategy);
            run_arity_reduced(q, d)
        }
        None => {
            let dp = decompose(&cnf::primal_graph(f), strategy);
            let di = decompose(&cnf::incidence_graph(f), strategy);
            let wp = dp.width().expect("graphs have at least one bag");
            let wi = di.width().expect("graphs have at least one bag");
            // The detour through arity reduction costs a constant factor in
            // width, so take it only when the primal width is far worse.
            if wp > 3 * wi + 10 {
                run_arity_reduced(q, di)
            } else {
                run_primal(q, &make_nice(&dp), Route::Primal)
            }
        }
    }
}

/// One constraint per clause: a single-path tree, as deep as the prefix,
/// whose leaf relation holds the clause's satisfying assignments. Checks
/// that every clause fits in a bag of `d`.
pub fn build_choice_constraints(
    q: &QbfFormula,
    d: &NiceTreeDecomposition,
) -> Result<Vec<ChoiceConstraint>, ChoiceError> {
    clause_attachments(q.matrix(), d)?;
    Ok((0..q.matrix().num_clauses())
        .map(|cid| clause_constraint(q, cid))
        .collect())
}

fn clause_constraint(q: &QbfFormula, cid: usize) -> ChoiceConstraint {
    let rel = Relation::from_clause(&q.matrix().clause(cid).literals);
    ChoiceConstraint::path(rel, q.quantifiers(), |v| {
        q.block_of(v).expect("closed formulas bind every matrix variable")
    })
}

/// For each clause, the first postorder node whose bag covers it: the child
/// of the earliest forget of any of its variables. Walking postorder hits
/// this node before any of the clause's variables is folded.
fn clause_attachments(
    f: &CnfFormula,
    d: &NiceTreeDecomposition,
) -> Result<Vec<Vec<usize>>, ChoiceError> {
    let order = d.postorder();
    let num_vertices = 1 + order
        .iter()
        .map(|&t| d.node(t).bag.last().copied().unwrap_or(0))
        .max()
        .unwrap_or(0) as usize;
    let mut forget_rank = vec![usize::MAX; num_vertices + 1];
    let mut forget_child = vec![usize::MAX; num_vertices + 1];
    for (i, &t) in order.iter().enumerate() {
        if let NiceNodeKind::Forget(v) = d.node(t).kind {
            forget_rank[v as usize] = i;
            forget_child[v as usize] = d.node(t).children[0];
        }
    }
    let mut attach = vec![Vec::new(); d.num_nodes()];
    for (cid, clause) in f.clauses() {
        if clause.literals.is_empty() {
            continue;
        }
        let earliest = clause
            .literals
            .iter()
            .map(|l| l.var().get() as usize)
            .min_by_key(|&v| forget_rank.get(v).copied().unwrap_or(usize::MAX))
            .unwrap();
        let covered = forget_rank.get(earliest).copied().unwrap_or(usize::MAX) != usize::MAX;
        if !covered {
            return Err(ChoiceError::ClauseNotCovered { clause: cid });
        }
        let host = forget_child[earliest];
        let bag = &d.node(host).bag;
        if !clause
            .literals
            .iter()
            .all(|l| bag.binary_search(&l.var().get()).is_ok())
        {
            return Err(ChoiceError::ClauseNotCovered { clause: cid });
        }
        attach[host].push(cid);
    }
    Ok(attach)
}

fn run_primal(q: &QbfFormula, nice: &NiceTreeDecomposition, route: Route) -> SolveResult {
    let attach = clause_attachments(q.matrix(), nice)
        .expect("the decomposition was validated against the primal graph");
    let mut stats = SolveStats {
        route,
        primal_width: nice.width(),
        decomposition_nodes: nice.num_nodes(),
        joins: 0,
        forgets: 0,
        node_ops: 0,
        peak_constraints: 0,
        max_constraint_nodes: 0,
    };
    let mut stack: Vec<Vec<ChoiceConstraint>> = Vec::new();
    for &t in &nice.postorder() {
        let node = nice.node(t);
        let mut pool = match node.kind {
            NiceNodeKind::Leaf => Vec::new(),
            NiceNodeKind::Introduce(_) => stack.pop().expect("child pool"),
            NiceNodeKind::Join => {
                let a = stack.pop().expect("right pool");
                let mut b = stack.pop().expect("left pool");
                b.extend(a);
                b
            }
            NiceNodeKind::Forget(v) => {
                let pool = stack.pop().expect("child pool");
                let var = Var::new(v);
                let (touching, mut rest): (Vec<_>, Vec<_>) = pool
                    .into_iter()
                    .partition(|c| c.scope().binary_search(&var).is_ok());
                if !touching.is_empty() {
                    let mut it = touching.into_iter();
                    let mut acc = it.next().unwrap();
                    for c in it {
                        acc = choice::join_counted(&acc, &c, &mut stats.node_ops)
                            .expect("all constraints share the prefix depth");
                        stats.joins += 1;
                    }
                    let folded = choice::forget_var_counted(&acc, var, &mut stats.node_ops)
                        .expect("the variable was just found in the scope");
                    stats.forgets += 1;
                    stats.max_constraint_nodes =
                        stats.max_constraint_nodes.max(folded.node_count());
                    rest.push(folded);
                }
                rest
            }
        };
        for &cid in &attach[t] {
            pool.push(clause_constraint(q, cid));
        }
        debug_assert!(pool.iter().all(|c| {
            c.scope()
                .iter()
                .all(|v| node.bag.binary_search(&v.get()).is_ok())
        }));
        let live: usize = stack.iter().map(Vec::len).sum::<usize>() + pool.len();
        stats.peak_constraints = stats.peak_constraints.max(live);
        stack.push(pool);
    }
    let root = stack.pop().expect("root pool");
    assert!(stack.is_empty(), "postorder consumes every pool");
    let value = root
        .iter()
        .all(|cc| choice::eval(cc, &mut stats.node_ops));
    SolveResult { value, stats }
}

/// The wide-clause detour: split clauses down to arity 3 along a
/// decomposition of the incidence graph, re-close the formula by
/// existentially quantifying the chaining variables innermost, turn the
/// certificate's decomposition into a primal one, and run the walk there.
fn run_arity_reduced(q: &QbfFormula, incidence: TreeDecomposition) -> SolveResult {
    let f = q.matrix();
    let cert = to_3cnf(f, &make_nice(&incidence));
    let fresh: Vec<Var> = (f.num_vars() + 1..=cert.target.num_vars())
        .map(Var::new)
        .collect();
    let mut prefix = q.prefix().to_vec();
    prefix.push(QuantifierBlock::exists(fresh));
    let widened =
        QbfFormula::new(prefix, cert.target.clone()).expect("splitting keeps the formula closed");
    let transfer = expand_clause_vertices(&cert.target, &cert.decomposition);
    debug_assert!(transfer
        .validate(&cnf::primal_graph(&cert.target))
        .violations
        .is_empty());
    run_primal(&widened, &make_nice(&transfer), Route::Incidence3Cnf)
}

/// Primal decomposition from an incidence one: each clause vertex in a bag
/// is replaced by the clause's variables. With arities at most 3 this
/// triples the width at worst.
fn expand_clause_vertices(f: &CnfFormula, incidence: &TreeDecomposition) -> TreeDecomposition {
    let n = f.num_vars();
    let mut out = TreeDecomposition::new(n as usize);
    for i in 0..incidence.num_nodes() {
        let mut bag: Vec<u32> = Vec::new();
        for &v in incidence.bag(i) {
            if v <= n {
                bag.push(v);
            } else {
                let clause = (v - n - 1) as usize;
                bag.extend(f.clause(clause).literals.iter().map(|l| l.var().get()));
            }
        }
        bag.sort_unstable();
        bag.dedup();
        out.add_bag(bag);
    }
    for &(a, b) in incidence.tree_edges() {
        out.add_edge(a, b);
    }
    out
}
