//! Width-preserving formula rewrites.
//!
//! Every rewrite here trades formula shape for fresh helper variables while
//! keeping a tree decomposition of the result whose width is an affine
//! function of the input width: [`to_3cnf`] caps clause arity at three,
//! [`negate_projection`] complements a formula's model set,
//! [`conjoin`] glues two formulas living on the same decomposition tree, and
//! [`subset_constraint`] expresses componentwise (strict) set inclusion
//! between two variable blocks. Fresh variables are always allocated above
//! every existing index, so the original variables keep their meaning and a
//! model of the source can be recovered by restriction.

mod conjoin;
mod negate;
pub(crate) mod reify;
mod subset;
mod threecnf;

pub use conjoin::{conjoin, ConjoinError};
pub use negate::{negate_projection, negation_width_bound};
pub use subset::{subset_constraint, subset_width_bound, SubsetError, SubsetMode};
pub(crate) use subset::strict_subset_piece;
pub use threecnf::{arity_reduction_width_bound, to_3cnf};

use crate::cnf::{CnfFormula, Var};
use crate::treedec::TreeDecomposition;

/// A formula together with the evidence that some source formula is its
/// projection: restricting `target`'s models to `source_vars` yields exactly
/// the model set the producing rewrite promises (the input's models for
/// [`to_3cnf`], their complement for [`negate_projection`], the strict
/// inclusions for [`subset_constraint`]). `decomposition` is a valid tree
/// decomposition of `target`'s incidence graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectionCertificate {
    pub source_vars: Vec<Var>,
    pub target: CnfFormula,
    pub decomposition: TreeDecomposition,
}
