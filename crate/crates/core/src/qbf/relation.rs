//! Small explicit relations over sorted variable scopes.
//!
//! A relation stores, for every assignment of its scope, one bit saying
//! whether the assignment is admitted. Row `i` assigns `scope[j]` the value
//! of bit `j` of `i`. Scopes stay sorted and deduplicated, and unused high
//! bits of the last word are always zero, so structurally equal relations
//! compare and hash equal.

use crate::cnf::{Lit, Var};

/// Hard cap on scope size; `2^26` rows is the largest table the solver is
/// willing to materialize per relation.
pub(crate) const MAX_SCOPE: usize = 26;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct Relation {
    scope: Vec<Var>,
    bits: Vec<u64>,
}

fn words_for(rows: usize) -> usize {
    rows.div_ceil(64).max(1)
}

/// Alternating masks: `HALVES[k]` keeps the low half of every
/// `2^(k+1)`-bit group of a word.
const HALVES: [u64; 6] = [
    0x5555_5555_5555_5555,
    0x3333_3333_3333_3333,
    0x0f0f_0f0f_0f0f_0f0f,
    0x00ff_00ff_00ff_00ff,
    0x0000_ffff_0000_ffff,
    0x0000_0000_ffff_ffff,
];

/// Within one word, keeps the `2^p`-bit groups whose row has bit `p` equal
/// to `value` and compacts them into the low 32 bits.
fn compress_half(w: u64, p: usize, value: bool) -> u64 {
    let g = 1u32 << p;
    let mut x = if value { w >> g } else { w };
    x &= HALVES[p];
    for k in p..5 {
        x = (x | (x >> (1u32 << k))) & HALVES[k + 1];
    }
    x & 0xffff_ffff
}

impl Relation {
    fn blank(scope: Vec<Var>) -> Self {
        assert!(scope.windows(2).all(|w| w[0] < w[1]), "scope must be sorted");
        assert!(scope.len() <= MAX_SCOPE, "scope of {} exceeds the row cap", scope.len());
        let rows = 1usize << scope.len();
        Relation {
            scope,
            bits: vec![0; words_for(rows)],
        }
    }

    /// Admits no assignment.
    pub fn empty(scope: Vec<Var>) -> Self {
        Self::blank(scope)
    }

    /// Admits every assignment.
    pub fn full(scope: Vec<Var>) -> Self {
        let mut r = Self::blank(scope);
        let rows = r.rows();
        for (w, word) in r.bits.iter_mut().enumerate() {
            let low = w * 64;
            *word = if low + 64 <= rows {
                u64::MAX
            } else {
                (1u64 << (rows - low)) - 1
            };
        }
        r
    }

    /// Admits exactly the assignments satisfying the clause; the scope is
    /// the clause's variables. A clause rules out a single row.
    pub fn from_clause(lits: &[Lit]) -> Self {
        let mut scope: Vec<Var> = lits.iter().map(|l| l.var()).collect();
        scope.sort_unstable();
        scope.dedup();
        assert_eq!(scope.len(), lits.len(), "clause literals must be over distinct variables");
        let mut r = Self::full(scope);
        let mut falsifying = 0usize;
        for l in lits {
            if !l.is_positive() {
                let j = r.position(l.var());
                falsifying |= 1 << j;
            }
        }
        r.clear_row(falsifying);
        r
    }

    /// Builds a small relation directly from a row bitmask: bit `i` of
    /// `mask` admits row `i`.
    pub fn from_row_mask(scope: Vec<Var>, mask: u64) -> Self {
        assert!(scope.len() <= 6, "row masks cover at most 6 variables");
        let mut r = Self::blank(scope);
        let all = Self::full(r.scope.clone());
        r.bits[0] = mask & all.bits[0];
        r
    }

    pub fn scope(&self) -> &[Var] {
        &self.scope
    }

    fn rows(&self) -> usize {
        1usize << self.scope.len()
    }

    fn position(&self, v: Var) -> usize {
        self.scope.binary_search(&v).expect("variable in scope")
    }

    pub(crate) fn row(&self, i: usize) -> bool {
        self.bits[i / 64] >> (i % 64) & 1 == 1
    }

    fn set_row(&mut self, i: usize) {
        self.bits[i / 64] |= 1 << (i % 64);
    }

    fn clear_row(&mut self, i: usize) {
        self.bits[i / 64] &= !(1 << (i % 64));
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    /// Restricts to rows assigning `v := value` and drops `v` from the
    /// scope. Word positions select whole word halves; in-word positions
    /// compact through the alternating masks.
    pub fn assign(&self, v: Var, value: bool) -> Relation {
        let j = self.position(v);
        let mut scope = self.scope.clone();
        scope.remove(j);
        let mut out = Relation::blank(scope);
        if j >= 6 {
            let low = (1usize << (j - 6)) - 1;
            for wo in 0..out.bits.len() {
                let src = (wo & low) | usize::from(value) << (j - 6) | (wo & !low) << 1;
                out.bits[wo] = self.bits[src];
            }
        } else {
            for wo in 0..out.bits.len() {
                let lo = compress_half(self.bits[2 * wo], j, value);
                let hi = if 2 * wo + 1 < self.bits.len() {
                    compress_half(self.bits[2 * wo + 1], j, value)
                } else {
                    0
                };
                out.bits[wo] = lo | hi << 32;
            }
        }
        out
    }

    /// Doubles the table by splicing in `v` as a new unconstrained
    /// variable: both of its values admit what the source admits.
    fn insert_free(&self, v: Var) -> Relation {
        let idx = self
            .scope
            .binary_search(&v)
            .expect_err("variable is not in the scope yet");
        let mut scope = self.scope.clone();
        scope.insert(idx, v);
        let mut out = Relation::blank(scope);
        if idx >= 6 {
            let low = (1usize << (idx - 6)) - 1;
            for wo in 0..out.bits.len() {
                out.bits[wo] = self.bits[(wo & low) | (wo >> 1) & !low];
            }
        } else {
            let g = 1u32 << idx;
            for wo in 0..out.bits.len() {
                let mut x = self.bits[wo >> 1] >> (32 * (wo as u32 & 1)) & 0xffff_ffff;
                for k in (idx..5).rev() {
                    x = (x | x << (1u32 << k)) & HALVES[k];
                }
                out.bits[wo] = x | x << g;
            }
        }
        out
    }

    /// Reshapes onto a larger scope; rows agree with the source on the old
    /// variables and are free on the new ones.
    pub fn conform(&self, target: &[Var]) -> Relation {
        if target == self.scope {
            return self.clone();
        }
        assert!(
            self.scope.iter().all(|v| target.binary_search(v).is_ok()),
            "target scope must contain the source scope"
        );
        let mut out = self.clone();
        for &v in target {
            if out.scope.binary_search(&v).is_err() {
                out = out.insert_free(v);
            }
        }
        out
    }

    /// Rows admitted by both; the result's scope is the union.
    pub fn meet(&self, other: &Relation) -> Relation {
        let mut union: Vec<Var> = self.scope.iter().chain(&other.scope).copied().collect();
        union.sort_unstable();
        union.dedup();
        let mut a = self.conform(&union);
        let b = other.conform(&union);
        for (w, bw) in a.bits.iter_mut().zip(&b.bits) {
            *w &= bw;
        }
        a
    }

    /// Rows admitted by either; the result's scope is the union.
    pub fn union(&self, other: &Relation) -> Relation {
        let mut union: Vec<Var> = self.scope.iter().chain(&other.scope).copied().collect();
        union.sort_unstable();
        union.dedup();
        let mut a = self.conform(&union);
        let b = other.conform(&union);
        for (w, bw) in a.bits.iter_mut().zip(&b.bits) {
            *w |= bw;
        }
        a
    }

    /// Both assignments of the variable at scope position `j` admit exactly
    /// the same rows. Compares the `j = 0` half against the `j = 1` half in
    /// place: across whole words when the position is past the word size,
    /// through alternating masks inside words otherwise.
    fn is_free_at(&self, j: usize) -> bool {
        if j >= 6 {
            let stride = 1usize << (j - 6);
            return (0..self.bits.len())
                .filter(|w| w & stride == 0)
                .all(|w| self.bits[w] == self.bits[w | stride]);
        }
        let mask = HALVES[j];
        let shift = 1u32 << j;
        self.bits.iter().all(|&w| w & mask == (w >> shift) & mask)
    }

    /// Is every assignment admitted by `self` admitted by `other`? Scopes
    /// need not match: both sides are read over the union scope, where a
    /// relation is free on variables outside its own scope. A union row
    /// splits into shared values `c`, self-only values `a`, and other-only
    /// values `b`, and inclusion says that whenever some `a` makes `self`
    /// admit `c`, every `b` makes `other` admit `c` — so each side collapses
    /// its private variables and the shared parts compare directly.
    pub fn subset_of(&self, other: &Relation) -> bool {
        if self.scope == other.scope {
            return self.bits.iter().zip(&other.bits).all(|(&a, &b)| a & !b == 0);
        }
        let mut sp = self.clone();
        for v in self.scope.clone() {
            if other.scope.binary_search(&v).is_err() {
                let mut zero = sp.assign(v, false);
                let one = sp.assign(v, true);
                for (w, ow) in zero.bits.iter_mut().zip(&one.bits) {
                    *w |= ow;
                }
                sp = zero;
            }
        }
        let mut oc = other.clone();
        for v in other.scope.clone() {
            if self.scope.binary_search(&v).is_err() {
                let mut zero = oc.assign(v, false);
                let one = oc.assign(v, true);
                for (w, ow) in zero.bits.iter_mut().zip(&one.bits) {
                    *w &= ow;
                }
                oc = zero;
            }
        }
        debug_assert_eq!(sp.scope, oc.scope);
        sp.bits.iter().zip(&oc.bits).all(|(&a, &b)| a & !b == 0)
    }

    /// Canonical form: drops every scope variable the admitted set does not
    /// depend on. Two relations admit the same assignments over any common
    /// extension of their scopes exactly when their canonical forms are
    /// structurally equal.
    pub fn drop_free_vars(&self) -> Relation {
        let mut out = self.clone();
        let mut j = 0;
        while j < out.scope.len() {
            if out.is_free_at(j) {
                out = out.assign(out.scope[j], false);
            } else {
                j += 1;
            }
        }
        out
    }
}
