//! Domain frontends built on the quantified solver: abstract argumentation,
//! propositional abduction, circumscription, and minimal-unsatisfiable-subset
//! membership.
//!
//! Each domain comes with four kinds of entry points:
//!
//! * an encoding route that assembles a two- or three-block quantified
//!   formula and decides it with [`crate::qbf::chen_solve`],
//! * an exhaustive oracle (capped to small instances) that decides the same
//!   question by enumeration, used to cross-check the encodings,
//! * a text format for instances, and
//! * a generator that turns a ∀∃ formula into a hard instance of the domain.

mod abduction;
mod af;
pub(crate) mod assemble;
mod circumscription;
mod mus;

pub use abduction::{
    abduction, abduction_subset, generate_pap_from_qbf, pap_oracle, parse_pap, write_pap,
    AbductionQuery, PapInstance, PapSolutions, SubsetQuery, PAP_HYPOTHESIS_CAP, PAP_VARIABLE_CAP,
};
pub use af::{
    af_decomposition_from_qbf, af_oracle, credulous, encode_admissible, generate_af_from_qbf,
    parse_af, skeptical, write_af, ArgumentationFramework, AF_ORACLE_CAP,
};
pub use circumscription::{
    circ_oracle, circumscription_entails, generate_circ_from_qbf, parse_circ, write_circ,
    CircumscriptionInstance, CIRC_ORACLE_CAP,
};
pub use mus::{
    generate_mus_from_qbf, mus_decomposition_from_qbf, mus_membership, mus_oracle, parse_mus,
    write_mus, MusQuery, MUS_CLAUSE_CAP, MUS_VARIABLE_CAP,
};

use crate::cnf::DimacsError;
use crate::treedec::Violation;
use thiserror::Error;

/// Errors shared by the domain frontends.
#[derive(Debug, Error)]
pub enum ProblemError {
    /// An argument name was declared twice.
    #[error("duplicate argument `{0}`")]
    DuplicateArgument(String),
    /// An attack or query referenced an argument that was never declared.
    #[error("unknown argument `{0}`")]
    UnknownArgument(String),
    /// An argument index does not exist in the framework.
    #[error("argument index {0} is out of range")]
    ArgumentOutOfRange(usize),
    /// A supplied tree decomposition is not valid for the instance's graph.
    #[error("invalid tree decomposition: {0:?}")]
    InvalidDecomposition(Vec<Violation>),
    /// An oracle was asked for an instance larger than its cap.
    #[error("instance size {size} exceeds the oracle cap {cap}")]
    CapExceeded { size: usize, cap: usize },
    /// A listed variable lies outside the instance's variable range.
    #[error("variable {0} is out of range for the instance")]
    VarOutOfRange(u32),
    /// A queried variable is not one of the instance's hypotheses.
    #[error("variable {0} is not a hypothesis")]
    NotAHypothesis(u32),
    /// The minimized/fixed/varying sets do not partition the variables.
    #[error("invalid variable partition: {0}")]
    InvalidPartition(String),
    /// A clause index does not exist in the formula.
    #[error("clause index {0} is out of range")]
    InvalidClauseId(usize),
    /// A generator was given a prefix shape it does not accept.
    #[error("unsupported prefix: {0}")]
    UnsupportedPrefix(String),
    /// A domain input file violates its format.
    #[error("format error: {0}")]
    Format(String),
    /// The embedded DIMACS body could not be parsed.
    #[error(transparent)]
    Dimacs(#[from] DimacsError),
}
