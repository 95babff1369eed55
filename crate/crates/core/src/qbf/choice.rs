//! Choice constraints: the solver's dynamic-programming values.
//!
//! A choice constraint pairs a variable scope with a uniform-depth tree whose
//! leaves carry relations over subsets of the scope. A node at depth `d`
//! lists the alternatives available at quantifier block `d + 1`; evaluation
//! folds each level existentially or universally according to the prefix,
//! and a leaf accepts when its relation still admits a row. The solver joins
//! constraints that share a variable and then folds that variable's two
//! values into the tree level of its block, so trees stay exactly as deep as
//! the prefix while scopes stay inside the bags of the decomposition
//! driving the run.
//!
//! Normalization keeps trees in a canonical form: leaf relations drop
//! variables they do not depend on, sibling lists are sorted and
//! deduplicated, and siblings made redundant by a stronger sibling are
//! pruned. At an existential level an alternative implied by another one
//! adds nothing to the disjunction; at a universal level an obligation
//! implied by another one adds nothing to the conjunction. Redundancy is
//! judged by a simulation order that future joins, folds, and evaluation
//! all preserve, so pruning never changes a verdict but keeps the lists
//! near their minimal antichains.

use super::relation::Relation;
use super::Quantifier;
use crate::cnf::Var;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChoiceError {
    #[error("constraints have depths {left} and {right}")]
    DepthMismatch { left: usize, right: usize },
    #[error("variable {var} is not in the constraint's scope")]
    VarNotInScope { var: u32 },
    #[error("clause {clause} is not covered by any bag of the decomposition")]
    ClauseNotCovered { clause: usize },
}

/// One level of a constraint tree. Children of a depth-`d` node are the
/// depth-`d+1` alternatives; all leaves sit at the same depth.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Node {
    Leaf(Relation),
    Inner(Vec<Node>),
}

impl Node {
    fn count(&self) -> u64 {
        match self {
            Node::Leaf(_) => 1,
            Node::Inner(children) => 1 + children.iter().map(Node::count).sum::<u64>(),
        }
    }
}

/// A scoped alternation tree; the unit the solver's pool is made of.
///
/// Each scope variable remembers which prefix block binds it, so folding a
/// variable out knows which tree level the branching belongs to; the prefix
/// quantifiers themselves ride along so normalization knows which fold each
/// level uses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChoiceConstraint {
    scope: Vec<Var>,
    blocks: Vec<usize>,
    quantifiers: Vec<Quantifier>,
    root: Node,
}

impl ChoiceConstraint {
    /// Variables the constraint still talks about, ascending.
    pub fn scope(&self) -> &[Var] {
        &self.scope
    }

    /// Distance from the root to every leaf: the number of prefix blocks.
    pub fn depth(&self) -> usize {
        self.quantifiers.len()
    }

    /// Total tree nodes, leaves included.
    pub fn node_count(&self) -> u64 {
        self.root.count()
    }

    /// 1-based prefix block of a scope variable.
    fn block_of(&self, v: Var) -> Option<usize> {
        self.scope.binary_search(&v).ok().map(|i| self.blocks[i])
    }

    /// A single-path tree over the given prefix ending in `rel`; the scope
    /// is the relation's scope, with `block_of` naming each variable's
    /// 1-based prefix block.
    pub(crate) fn path(
        rel: Relation,
        quantifiers: Vec<Quantifier>,
        block_of: impl Fn(Var) -> usize,
    ) -> Self {
        let scope = rel.scope().to_vec();
        let blocks: Vec<usize> = scope.iter().map(|&v| block_of(v)).collect();
        assert!(
            blocks.iter().all(|&b| b >= 1 && b <= quantifiers.len()),
            "blocks must be 1-based and within the prefix"
        );
        let mut node = Node::Leaf(rel);
        for _ in 0..quantifiers.len() {
            node = Node::Inner(vec![node]);
        }
        ChoiceConstraint {
            scope,
            blocks,
            quantifiers,
            root: node,
        }
    }
}

/// Rewrites the tree into canonical form: leaves drop free variables, child
/// lists are sorted, deduplicated, and stripped of redundant siblings,
/// bottom-up. Canonical trees denote the same alternatives exactly when
/// they are equal, so normalized results compare structurally.
pub fn normalize(cc: &ChoiceConstraint) -> ChoiceConstraint {
    let mut ops = 0;
    normalize_counted(cc, &mut ops)
}

pub(crate) fn normalize_counted(cc: &ChoiceConstraint, ops: &mut u64) -> ChoiceConstraint {
    let out = ChoiceConstraint {
        scope: cc.scope.clone(),
        blocks: cc.blocks.clone(),
        quantifiers: cc.quantifiers.clone(),
        root: normalize_node(&cc.root, &cc.quantifiers, ops),
    };
    debug_assert!(out.node_count() <= size_budget(out.depth(), out.scope.len()));
    out
}

fn normalize_node(n: &Node, below: &[Quantifier], ops: &mut u64) -> Node {
    *ops += 1;
    match n {
        Node::Leaf(r) => Node::Leaf(r.drop_free_vars()),
        Node::Inner(children) => {
            let mut kept: Vec<Node> = Vec::with_capacity(children.len());
            for c in children {
                let kid = normalize_node(c, &below[1..], ops);
                insert_pruned(&mut kept, kid, below, ops);
            }
            kept.sort_unstable();
            Node::Inner(kept)
        }
    }
}

/// Adds a canonical candidate to a canonical sibling list, keeping the
/// list an antichain. Under an existential fold a child dominated by a kept
/// sibling can go; under a universal fold a child dominating a kept sibling
/// can go. On canonical children the simulation order is antisymmetric, so
/// the surviving antichain does not depend on insertion order. Pruning at
/// insertion time, rather than after a whole level is built, is what keeps
/// joins and folds from materializing the full product of child lists.
///
/// Leaves under the innermost existential fold collapse outright: pairwise
/// meets, assignments, and the final nonemptiness test all distribute over
/// unions of relations, so such a list denotes exactly the union of its
/// leaves and is kept as that single leaf.
fn insert_pruned(kept: &mut Vec<Node>, cand: Node, below: &[Quantifier], ops: &mut u64) {
    if below == [Quantifier::Exists] {
        let Node::Leaf(rc) = &cand else {
            unreachable!("the innermost level holds leaves");
        };
        *ops += 1;
        match kept.first_mut() {
            None => kept.push(cand),
            Some(Node::Leaf(r)) => *r = r.union(rc).drop_free_vars(),
            Some(Node::Inner(_)) => unreachable!("the innermost level holds leaves"),
        }
        return;
    }
    let redundant = |weak: &Node, strong: &Node, ops: &mut u64| match below[0] {
        Quantifier::Exists => dominates(strong, weak, &below[1..], ops),
        Quantifier::Forall => dominates(weak, strong, &below[1..], ops),
    };
    if kept.iter().any(|e| redundant(&cand, e, ops)) {
        return;
    }
    kept.retain(|e| !redundant(e, &cand, ops));
    kept.push(cand);
}

/// The simulation order: `a` dominates `b` when, in every context of
/// further joins and folds, `b` accepting implies `a` accepting. Leaves
/// compare by row inclusion; inner nodes compare by covering alternatives
/// (existential levels) or by answering obligations (universal levels).
fn dominates(a: &Node, b: &Node, below: &[Quantifier], ops: &mut u64) -> bool {
    *ops += 1;
    if a == b {
        return true;
    }
    match (a, b) {
        (Node::Leaf(ra), Node::Leaf(rb)) => rb.subset_of(ra),
        (Node::Inner(xa), Node::Inner(xb)) => match below[0] {
            Quantifier::Exists => xb
                .iter()
                .all(|cb| xa.iter().any(|ca| dominates(ca, cb, &below[1..], ops))),
            Quantifier::Forall => xa
                .iter()
                .all(|ca| xb.iter().any(|cb| dominates(ca, cb, &below[1..], ops))),
        },
        _ => unreachable!("equal depth keeps node kinds aligned"),
    }
}

/// Loose telemetry ceiling on the size of a normalized depth-`r` tree over
/// `s` scope variables; saturates far before it could bind in practice. The
/// `+2` keeps the tower from degenerating at empty scopes, where two
/// distinct nullary leaves still exist.
fn size_budget(r: usize, s: usize) -> u64 {
    let arg = 2 * s as u64 + 2;
    let b = super::growth_bound(r as u32 + 1, arg);
    if arg >= 63 {
        return u64::MAX;
    }
    b.saturating_mul(1u64 << arg)
}

/// Conjoins two constraints of equal depth into one over the union scope.
/// Children multiply pairwise level by level and leaf relations intersect,
/// so a strategy for the join is exactly a pair of strategies for the
/// operands; the result comes back normalized.
pub fn join(a: &ChoiceConstraint, b: &ChoiceConstraint) -> Result<ChoiceConstraint, ChoiceError> {
    let mut ops = 0;
    join_counted(a, b, &mut ops)
}

pub(crate) fn join_counted(
    a: &ChoiceConstraint,
    b: &ChoiceConstraint,
    ops: &mut u64,
) -> Result<ChoiceConstraint, ChoiceError> {
    if a.depth() != b.depth() {
        return Err(ChoiceError::DepthMismatch {
            left: a.depth(),
            right: b.depth(),
        });
    }
    debug_assert_eq!(
        a.quantifiers, b.quantifiers,
        "operands must come from the same prefix"
    );
    let mut scope: Vec<Var> = a.scope.iter().chain(&b.scope).copied().collect();
    scope.sort_unstable();
    scope.dedup();
    let blocks: Vec<usize> = scope
        .iter()
        .map(|&v| {
            let tag = a.block_of(v).or_else(|| b.block_of(v));
            tag.expect("every scope variable comes from an operand")
        })
        .collect();
    debug_assert!(
        scope
            .iter()
            .zip(&blocks)
            .all(|(&v, &t)| a.block_of(v).unwrap_or(t) == t && b.block_of(v).unwrap_or(t) == t),
        "operands must agree on the prefix block of shared variables"
    );
    let joined = ChoiceConstraint {
        scope,
        blocks,
        quantifiers: a.quantifiers.clone(),
        root: join_node(&a.root, &b.root, &a.quantifiers, ops),
    };
    debug_assert!(joined.node_count() <= size_budget(joined.depth(), joined.scope.len()));
    debug_assert_eq!(normalize(&joined), joined, "joins produce canonical trees");
    Ok(joined)
}

fn join_node(x: &Node, y: &Node, below: &[Quantifier], ops: &mut u64) -> Node {
    *ops += 1;
    match (x, y) {
        (Node::Leaf(rx), Node::Leaf(ry)) => Node::Leaf(rx.meet(ry).drop_free_vars()),
        (Node::Inner(xs), Node::Inner(ys)) => {
            let mut kept: Vec<Node> = Vec::new();
            for cx in xs {
                for cy in ys {
                    let kid = join_node(cx, cy, &below[1..], ops);
                    insert_pruned(&mut kept, kid, below, ops);
                }
            }
            kept.sort_unstable();
            Node::Inner(kept)
        }
        _ => unreachable!("equal depth keeps node kinds aligned"),
    }
}

/// Removes `v` from the scope by folding its two values into the tree level
/// of `v`'s block: every alternative at that level splits into its `v=0` and
/// `v=1` specializations, offered side by side. Evaluation then quantifies
/// over the split exactly where the prefix quantifies `v`. The caller must
/// have joined away any other constraint mentioning `v` first; the result
/// comes back normalized.
pub fn forget_var(cc: &ChoiceConstraint, v: Var) -> Result<ChoiceConstraint, ChoiceError> {
    let mut ops = 0;
    forget_var_counted(cc, v, &mut ops)
}

pub(crate) fn forget_var_counted(
    cc: &ChoiceConstraint,
    v: Var,
    ops: &mut u64,
) -> Result<ChoiceConstraint, ChoiceError> {
    let Ok(i) = cc.scope.binary_search(&v) else {
        return Err(ChoiceError::VarNotInScope { var: v.get() });
    };
    let block = cc.blocks[i];
    let mut scope = cc.scope.clone();
    let mut blocks = cc.blocks.clone();
    scope.remove(i);
    blocks.remove(i);
    let folded = ChoiceConstraint {
        scope,
        blocks,
        quantifiers: cc.quantifiers.clone(),
        root: forget_node(&cc.root, v, block - 1, &cc.quantifiers, ops),
    };
    debug_assert!(folded.node_count() <= size_budget(folded.depth(), folded.scope.len()));
    debug_assert_eq!(normalize(&folded), folded, "folds produce canonical trees");
    Ok(folded)
}

fn forget_node(n: &Node, v: Var, levels_above: usize, below: &[Quantifier], ops: &mut u64) -> Node {
    *ops += 1;
    let Node::Inner(children) = n else {
        unreachable!("folding happens strictly above the leaves");
    };
    let mut kept: Vec<Node> = Vec::new();
    if levels_above > 0 {
        for c in children {
            let kid = forget_node(c, v, levels_above - 1, &below[1..], ops);
            insert_pruned(&mut kept, kid, below, ops);
        }
    } else {
        for c in children {
            for value in [false, true] {
                let kid = assign_below(c, v, value, &below[1..], ops);
                insert_pruned(&mut kept, kid, below, ops);
            }
        }
    }
    kept.sort_unstable();
    Node::Inner(kept)
}

fn assign_below(n: &Node, v: Var, value: bool, below: &[Quantifier], ops: &mut u64) -> Node {
    *ops += 1;
    match n {
        Node::Leaf(r) => {
            if r.scope().contains(&v) {
                Node::Leaf(r.assign(v, value).drop_free_vars())
            } else {
                Node::Leaf(r.clone())
            }
        }
        Node::Inner(children) => {
            let mut kept: Vec<Node> = Vec::new();
            for c in children {
                let kid = assign_below(c, v, value, &below[1..], ops);
                insert_pruned(&mut kept, kid, below, ops);
            }
            kept.sort_unstable();
            Node::Inner(kept)
        }
    }
}

/// Truth of a fully folded constraint: disjunction over children at
/// existential levels, conjunction at universal ones, and a leaf holds when
/// its relation is nonempty.
pub(crate) fn eval(cc: &ChoiceConstraint, ops: &mut u64) -> bool {
    assert!(cc.scope.is_empty(), "evaluation needs a fully folded constraint");
    eval_node(&cc.root, &cc.quantifiers, ops)
}

fn eval_node(n: &Node, quantifiers: &[Quantifier], ops: &mut u64) -> bool {
    *ops += 1;
    match n {
        Node::Leaf(r) => !r.is_empty(),
        Node::Inner(children) => match quantifiers[0] {
            Quantifier::Exists => children.iter().any(|c| eval_node(c, &quantifiers[1..], ops)),
            Quantifier::Forall => children.iter().all(|c| eval_node(c, &quantifiers[1..], ops)),
        },
    }
}
