//! Treewidth-aware QBF solving and CNF machinery.
//!
//! The crate is organized bottom-up: [`cnf`] and [`graph`] give formulas and
//! their associated graphs, [`treedec`] computes and validates tree
//! decompositions, [`transform`] rewrites formulas while tracking projection
//! semantics and decomposition width, [`qbf`] evaluates quantified formulas
//! through a dynamic program over tree-shaped constraints, and [`problems`]
//! reduces four reasoning tasks onto that solver. [`bench`] holds the
//! deterministic instance families used for scaling measurements.

pub mod bench;
pub mod cnf;
pub mod graph;
pub mod problems;
pub mod qbf;
pub mod transform;
pub mod treedec;
