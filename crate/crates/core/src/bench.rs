//! Deterministic formula families for scaling measurements.
//!
//! Both families come with a hand-built path decomposition attached, so the
//! solver's work is spent on the dynamic program itself rather than on a
//! decomposition heuristic, and so the width under test is exact by
//! construction. Everything here is a pure function of its arguments: signs
//! come from an integer mixer, never from a random number generator, so
//! repeated runs measure identical instances.

use crate::cnf::{CnfFormula, Lit, Var};
use crate::qbf::{MatrixGraph, QbfFormula, QuantifierBlock};
use crate::treedec::TreeDecomposition;

/// SplitMix64 finalizer: a fixed bijective scrambler on `u64`. One step of
/// the standard constants is enough to decorrelate the packed window/slot
/// indices fed to it; we only ever read one bit of the result.
fn mix(z: u64) -> u64 {
    let mut z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Deterministic literal sign for clause family `salt`, window `i`, slot `j`.
fn sign(salt: u64, i: u64, j: u64) -> bool {
    mix((salt << 42) ^ (i << 21) ^ j) & 1 == 1
}

/// Splits `1..=n` into a two-block prefix: odd variables universal, even
/// variables existential. The interleaving keeps both quantifiers present in
/// every bag of the decompositions built here.
fn odd_forall_even_exists(n: usize) -> Vec<QuantifierBlock> {
    let odd = (1..=n as u32).step_by(2).map(Var::new).collect();
    let even = (2..=n as u32).step_by(2).map(Var::new).collect();
    vec![
        QuantifierBlock::forall(odd),
        QuantifierBlock::exists(even),
    ]
}

/// Matrix plus path decomposition shared by the families below: variables
/// `1..=n` in a row, `clauses_per_window` clauses over every window of
/// `width + 1` consecutive variables with mixer-chosen signs, and one bag
/// per window. The primal graph is a chain of overlapping cliques, each
/// contained in its window's bag, so the decomposition has width exactly
/// `width` while the instance size grows with `n`.
fn window_family(
    n: usize,
    width: usize,
    clauses_per_window: u64,
) -> (CnfFormula, TreeDecomposition) {
    assert!(width >= 1, "a window needs at least two variables");
    assert!(n >= width + 1, "need at least one full window");
    let mut matrix = CnfFormula::new(n as u32);
    let windows = n - width;
    for i in 0..windows {
        for salt in 0..clauses_per_window {
            let clause = (0..=width)
                .map(|j| {
                    let v = Var::new((i + j + 1) as u32);
                    Lit::new(v, sign(salt, i as u64, j as u64))
                })
                .collect();
            matrix
                .add_clause(clause)
                .expect("window clauses are well-formed");
        }
    }

    let mut d = TreeDecomposition::new(n);
    for i in 0..windows {
        let bag = (0..=width).map(|j| (i + j + 1) as u32).collect();
        let node = d.add_bag(bag);
        if i > 0 {
            d.add_edge(node - 1, node);
        }
    }
    (matrix, d)
}

/// Chain family: two clauses per window and a two-block prefix (odd
/// variables universal, even existential). Scaling `n` at fixed `width`
/// grows the instance linearly without changing the width, which makes this
/// the family for measuring how total work scales with size.
///
/// Requires `n >= width + 1 >= 2`.
pub fn chain(n: usize, width: usize) -> QbfFormula {
    let (matrix, d) = window_family(n, width, 2);
    let mut q = QbfFormula::new(odd_forall_even_exists(n), matrix)
        .expect("chain formulas are closed");
    q.attach_decomposition(MatrixGraph::Primal, d)
        .expect("window bags cover the window cliques");
    q
}

/// Braid family: three interleaved strands of variables (by index residue
/// mod 3) quantified exists/forall/exists, with six clauses per window. The
/// deeper prefix and denser windows make the per-step cost of the solver
/// climb quickly as `width` grows, which makes this the family for
/// measuring how work responds to width at fixed `n`.
///
/// Requires `n >= width + 1 >= 2`.
pub fn braid(n: usize, width: usize) -> QbfFormula {
    let (matrix, d) = window_family(n, width, 6);
    let strand =
        |r: u32| (1..=n as u32).filter(move |v| v % 3 == r).map(Var::new).collect();
    let prefix = vec![
        QuantifierBlock::exists(strand(1)),
        QuantifierBlock::forall(strand(2)),
        QuantifierBlock::exists(strand(0)),
    ];
    let mut q = QbfFormula::new(prefix, matrix).expect("braid formulas are closed");
    q.attach_decomposition(MatrixGraph::Primal, d)
        .expect("window bags cover the window cliques");
    q
}

/// Grid family: one variable per cell of a `rows x cols` grid, one clause
/// per horizontally or vertically adjacent pair, signs from the mixer. The
/// attached path decomposition sweeps column pairs left to right, so its
/// width is exactly `2 * rows - 1` (or `rows - 1` for a single column):
/// fixing `rows` caps the width while `cols` scales the instance.
///
/// Requires `rows >= 1` and `cols >= 1`.
pub fn grid(rows: usize, cols: usize) -> QbfFormula {
    assert!(rows >= 1 && cols >= 1, "the grid must be nonempty");
    let n = rows * cols;
    let cell = |r: usize, c: usize| Var::new((r * cols + c + 1) as u32);
    let mut matrix = CnfFormula::new(n as u32);
    let mut pair = |a: Var, b: Var, i: u64| {
        let clause = vec![
            Lit::new(a, sign(2, i, 0)),
            Lit::new(b, sign(2, i, 1)),
        ];
        matrix
            .add_clause(clause)
            .expect("pair clauses are well-formed");
    };
    for r in 0..rows {
        for c in 0..cols {
            let here = cell(r, c);
            let id = (r * cols + c) as u64;
            if c + 1 < cols {
                pair(here, cell(r, c + 1), 2 * id);
            }
            if r + 1 < rows {
                pair(here, cell(r + 1, c), 2 * id + 1);
            }
        }
    }

    let mut d = TreeDecomposition::new(n);
    let column = |c: usize| (0..rows).map(move |r| cell(r, c).get());
    if cols == 1 {
        d.add_bag(column(0).collect());
    }
    for c in 0..cols.saturating_sub(1) {
        let bag = column(c).chain(column(c + 1)).collect();
        let node = d.add_bag(bag);
        if c > 0 {
            d.add_edge(node - 1, node);
        }
    }

    let mut q = QbfFormula::new(odd_forall_even_exists(n), matrix)
        .expect("grid formulas are closed");
    q.attach_decomposition(MatrixGraph::Primal, d)
        .expect("column-pair bags cover all grid edges");
    q
}
