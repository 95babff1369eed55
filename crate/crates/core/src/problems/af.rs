//! Abstract argumentation under admissible/preferred semantics: a directed
//! attack graph, a CNF encoding of its admissible sets, credulous and
//! skeptical acceptance, an exhaustive oracle, and a generator that turns a
//! ∀∃ formula into an equivalent skeptical-acceptance instance.
//!
//! Encoding conventions: for a framework with `n` arguments, variable `a+1`
//! ("x_a") says argument `a` is in the chosen set, and variable `n+a+1`
//! ("P_a") says some chosen argument attacks `a`. The P variables are forced
//! both ways from the x variables, which is what lets the acceptance
//! encodings re-use them under complementation.

use super::assemble::{split_forall_exists, Assembly};
use super::ProblemError;
use crate::cnf::{incidence_clause_vertex, CnfFormula, Lit, Var};
use crate::graph::Graph;
use crate::qbf::{chen_solve, QbfFormula, QuantifierBlock};
use crate::transform::reify::Piece;
use crate::treedec::TreeDecomposition;
use std::collections::{BTreeSet, HashMap};

/// Largest framework the exhaustive oracle accepts.
pub const AF_ORACLE_CAP: usize = 16;

/// A directed attack graph over named arguments. Arguments are addressed by
/// dense ids in insertion order; self-attacks are permitted.
#[derive(Debug, Clone, Default)]
pub struct ArgumentationFramework {
    names: Vec<String>,
    ids: HashMap<String, usize>,
    attacks: BTreeSet<(usize, usize)>,
}

impl ArgumentationFramework {
    pub fn new() -> Self {
        Self::default()
    }

    /// Declares an argument and returns its id. Names must be non-empty,
    /// whitespace-free, and unique.
    pub fn add_argument(&mut self, name: &str) -> Result<usize, ProblemError> {
        if name.is_empty() || name.chars().any(char::is_whitespace) {
            return Err(ProblemError::Format(format!(
                "argument name `{name}` must be non-empty and contain no whitespace"
            )));
        }
        if self.ids.contains_key(name) {
            return Err(ProblemError::DuplicateArgument(name.to_string()));
        }
        let id = self.names.len();
        self.names.push(name.to_string());
        self.ids.insert(name.to_string(), id);
        Ok(id)
    }

    /// Records that `attacker` attacks `target`. Duplicates are merged.
    pub fn add_attack(&mut self, attacker: usize, target: usize) -> Result<(), ProblemError> {
        let n = self.names.len();
        if attacker >= n {
            return Err(ProblemError::ArgumentOutOfRange(attacker));
        }
        if target >= n {
            return Err(ProblemError::ArgumentOutOfRange(target));
        }
        self.attacks.insert((attacker, target));
        Ok(())
    }

    pub fn num_arguments(&self) -> usize {
        self.names.len()
    }

    pub fn argument_name(&self, id: usize) -> &str {
        &self.names[id]
    }

    pub fn argument_id(&self, name: &str) -> Option<usize> {
        self.ids.get(name).copied()
    }

    /// All attacks as (attacker, target), ascending.
    pub fn attacks(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.attacks.iter().copied()
    }

    /// Attackers of each argument, ascending.
    fn attackers(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.names.len()];
        for &(a, b) in &self.attacks {
            out[b].push(a);
        }
        out
    }

    /// The attack structure as an undirected graph: argument `i` is vertex
    /// `i+1`, every attacked pair becomes one edge. Self-attacks need no
    /// edge (a bag holding the vertex covers them).
    pub fn graph(&self) -> Graph {
        let mut edges = BTreeSet::new();
        for &(a, b) in &self.attacks {
            if a != b {
                edges.insert((a.min(b) as u32 + 1, a.max(b) as u32 + 1));
            }
        }
        Graph::from_edges(self.names.len(), edges)
    }
}

/// Reads the line-based framework format: `arg <name>` declares an
/// argument, `att <attacker> <target>` an attack between declared
/// arguments. Blank lines and lines starting with `#` are skipped.
pub fn parse_af(input: &str) -> Result<ArgumentationFramework, ProblemError> {
    let mut af = ArgumentationFramework::new();
    for line in input.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match tokens.as_slice() {
            ["arg", name] => {
                af.add_argument(name)?;
            }
            ["att", a, b] => {
                let a = af
                    .argument_id(a)
                    .ok_or_else(|| ProblemError::UnknownArgument(a.to_string()))?;
                let b = af
                    .argument_id(b)
                    .ok_or_else(|| ProblemError::UnknownArgument(b.to_string()))?;
                af.add_attack(a, b)?;
            }
            _ => {
                return Err(ProblemError::Format(format!(
                    "unrecognized framework line `{line}`"
                )))
            }
        }
    }
    Ok(af)
}

/// Writes the framework in the format accepted by [`parse_af`].
pub fn write_af(af: &ArgumentationFramework) -> String {
    let mut out = String::new();
    for name in &af.names {
        out.push_str(&format!("arg {name}\n"));
    }
    for &(a, b) in &af.attacks {
        out.push_str(&format!("att {} {}\n", af.names[a], af.names[b]));
    }
    out
}

/// The clause plan of the admissibility encoding, in the fixed order shared
/// by the formula builder and the decomposition builder.
#[derive(Debug, Clone, Copy)]
enum AdmClause {
    /// Attacker and target cannot both be chosen.
    Conflict(usize, usize),
    /// The indicator of `a` implies some attacker of `a` is chosen.
    Defender(usize),
    /// A chosen attacker of `a` sets the indicator of `a`: (target, attacker).
    Guard(usize, usize),
    /// A chosen argument's attacker must itself be attacked: (target, attacker).
    Defense(usize, usize),
}

fn admissible_schema(af: &ArgumentationFramework) -> Vec<AdmClause> {
    let attackers = af.attackers();
    let n = af.num_arguments();
    let mut out: Vec<AdmClause> = af
        .attacks()
        .map(|(a, b)| AdmClause::Conflict(a, b))
        .collect();
    for a in 0..n {
        out.push(AdmClause::Defender(a));
    }
    for a in 0..n {
        for &b in &attackers[a] {
            out.push(AdmClause::Guard(a, b));
        }
    }
    for a in 0..n {
        for &b in &attackers[a] {
            out.push(AdmClause::Defense(a, b));
        }
    }
    out
}

fn schema_lits(
    entry: AdmClause,
    attackers: &[Vec<usize>],
    x: &dyn Fn(usize) -> Var,
    p: &dyn Fn(usize) -> Var,
) -> Vec<Lit> {
    match entry {
        AdmClause::Conflict(a, b) => vec![Lit::neg(x(a)), Lit::neg(x(b))],
        AdmClause::Defender(a) => {
            let mut lits = vec![Lit::neg(p(a))];
            lits.extend(attackers[a].iter().map(|&b| Lit::pos(x(b))));
            lits
        }
        AdmClause::Guard(a, b) => vec![Lit::pos(p(a)), Lit::neg(x(b))],
        AdmClause::Defense(a, b) => vec![Lit::neg(x(a)), Lit::pos(p(b))],
    }
}

/// The admissibility formula over `2n` variables (set variables first, then
/// attack indicators). Its models, restricted to the set variables, are
/// exactly the admissible sets; the indicators are forced.
pub(crate) fn admissible_formula(af: &ArgumentationFramework) -> CnfFormula {
    let n = af.num_arguments();
    let attackers = af.attackers();
    let x = |a: usize| Var::new(a as u32 + 1);
    let p = |a: usize| Var::new((n + a) as u32 + 1);
    let mut f = CnfFormula::new(2 * n as u32);
    for entry in admissible_schema(af) {
        f.add_clause(schema_lits(entry, &attackers, &x, &p))
            .expect("admissibility clauses are well-formed");
    }
    f
}

/// Encodes the admissible sets of `af` as a CNF formula together with a
/// tree decomposition of the formula's incidence graph derived from the
/// supplied decomposition of the attack graph. For input width `k` the
/// output width is at most `3k + 2`: bags gain the attack indicators of
/// their arguments plus one long-clause vertex per argument, and all other
/// clauses sit in hung-off leaf bags of size three.
pub fn encode_admissible(
    af: &ArgumentationFramework,
    d: &TreeDecomposition,
) -> Result<(CnfFormula, TreeDecomposition), ProblemError> {
    let report = d.validate(&af.graph());
    if !report.is_ok() {
        return Err(ProblemError::InvalidDecomposition(report.violations));
    }
    let n = af.num_arguments();
    let nu = n as u32;
    let f = admissible_formula(af);
    let schema = admissible_schema(af);

    // vertex numbering in the incidence graph of `f`
    let xv = |a: usize| a as u32 + 1;
    let pv = |a: usize| nu + a as u32 + 1;
    let cv = |j: usize| incidence_clause_vertex(&f, j);
    let host_with = |want: &[u32]| {
        (0..d.num_nodes())
            .find(|&t| want.iter().all(|w| d.bag(t).binary_search(w).is_ok()))
            .expect("validated decomposition covers every attack")
    };

    // interior bags: arguments plus their indicators
    let mut bags: Vec<Vec<u32>> = (0..d.num_nodes())
        .map(|t| {
            d.bag(t)
                .iter()
                .flat_map(|&v| [v, nu + v])
                .collect::<Vec<u32>>()
        })
        .collect();
    if bags.is_empty() {
        bags.push(Vec::new());
    }
    // long defender clauses ride along with their argument; short clauses
    // hang off a bag where their two variables meet
    let mut leaves: Vec<(usize, Vec<u32>)> = Vec::new();
    for (j, &entry) in schema.iter().enumerate() {
        match entry {
            AdmClause::Defender(a) => {
                for (t, bag) in bags.iter_mut().enumerate().take(d.num_nodes()) {
                    if d.bag(t).binary_search(&xv(a)).is_ok() {
                        bag.push(cv(j));
                    }
                }
            }
            AdmClause::Conflict(a, b) => {
                let host = host_with(&[xv(a), xv(b)]);
                leaves.push((host, vec![cv(j), xv(a), xv(b)]));
            }
            AdmClause::Guard(a, b) => {
                let host = host_with(&[xv(a), xv(b)]);
                leaves.push((host, vec![cv(j), pv(a), xv(b)]));
            }
            AdmClause::Defense(a, b) => {
                let host = host_with(&[xv(a), xv(b)]);
                leaves.push((host, vec![cv(j), xv(a), pv(b)]));
            }
        }
    }

    let mut dec = TreeDecomposition::new(2 * n + f.num_clauses());
    for bag in bags {
        let mut bag: Vec<u32> = bag;
        bag.dedup();
        dec.add_bag(bag);
    }
    for &(s, t) in d.tree_edges() {
        dec.add_edge(s, t);
    }
    for (host, mut bag) in leaves {
        bag.sort_unstable();
        bag.dedup();
        let leaf = dec.add_bag(bag);
        dec.add_edge(host, leaf);
    }

    debug_assert!(dec.validate(&crate::cnf::incidence_graph(&f)).is_ok());
    let k = d.width().expect("validated decomposition has bags");
    let w = dec.width().expect("output decomposition has bags");
    assert!(w <= 3 * k + 2, "encoding width {w} exceeds 3*{k}+2");
    Ok((f, dec))
}

/// Does some admissible set contain all of `s`? Decided as plain
/// satisfiability of the admissibility encoding with the queried arguments
/// forced in.
pub fn credulous(af: &ArgumentationFramework, s: &[usize]) -> Result<bool, ProblemError> {
    let n = af.num_arguments();
    for &a in s {
        if a >= n {
            return Err(ProblemError::ArgumentOutOfRange(a));
        }
    }
    let mut f = admissible_formula(af);
    for &a in s {
        f.add_clause(vec![Lit::pos(Var::new(a as u32 + 1))])
            .expect("unit query clause is well-formed");
    }
    let vars = (1..=f.num_vars()).map(Var::new).collect();
    let q = QbfFormula::new(vec![QuantifierBlock::exists(vars)], f)
        .expect("fully existential prefix covers the matrix");
    Ok(chen_solve(&q))
}

/// Does every preferred (subset-maximal admissible) set contain all of `s`?
///
/// Decided as a ∀∃ formula over the set choice: for every choice, either
/// its forced indicators falsify some admissibility condition, or some
/// strictly larger choice is admissible (so the choice is not preferred),
/// or the choice already contains the query.
pub fn skeptical(af: &ArgumentationFramework, s: &[usize]) -> Result<bool, ProblemError> {
    Ok(chen_solve(&skeptical_qbf(af, s)?))
}

/// The quantified formula behind [`skeptical`], exposed for inspection.
fn skeptical_qbf(af: &ArgumentationFramework, s: &[usize]) -> Result<QbfFormula, ProblemError> {
    let n = af.num_arguments();
    for &a in s {
        if a >= n {
            return Err(ProblemError::ArgumentOutOfRange(a));
        }
    }
    let nu = n as u32;
    let x = |a: usize| Var::new(a as u32 + 1);
    let p = |a: usize| Var::new(nu + a as u32 + 1);
    let xp = |a: usize| Var::new(2 * nu + a as u32 + 1);
    let pp = |a: usize| Var::new(3 * nu + a as u32 + 1);
    let attackers = af.attackers();
    let schema = admissible_schema(af);

    let mut asm = Assembly::new(4 * nu);
    // the indicators of the universally chosen set are forced both ways
    for &entry in &schema {
        if matches!(entry, AdmClause::Defender(_) | AdmClause::Guard(..)) {
            asm.require(schema_lits(entry, &attackers, &x, &p));
        }
    }
    // alternative 1: the chosen set fails a conflict or defense condition
    let mut conditions = asm.sub();
    for &entry in &schema {
        if matches!(entry, AdmClause::Conflict(..) | AdmClause::Defense(..)) {
            conditions
                .add_clause(schema_lits(entry, &attackers, &x, &p))
                .expect("admissibility clauses are well-formed");
        }
    }
    let not_admissible = asm.complement(&conditions);
    // alternative 2: some strictly larger set is admissible
    let mut larger = Piece::new();
    for &entry in &schema {
        larger.require(schema_lits(entry, &attackers, &xp, &pp));
    }
    let xs: Vec<Var> = (0..n).map(x).collect();
    let xps: Vec<Var> = (0..n).map(xp).collect();
    larger.merge(asm.strict_subset(&xs, &xps));
    // alternative 3: the chosen set contains the query
    let mut contains = Piece::new();
    for &a in s {
        contains.require(vec![Lit::pos(x(a))]);
    }
    asm.select_one(&[not_admissible, larger, contains]);
    Ok(asm.into_forall_exists(xs))
}

fn admissible_mask(n: usize, attacks_of: &[u32], attackers_of: &[u32], mask: u32) -> bool {
    let mut attacked = 0u32;
    for a in 0..n {
        if mask >> a & 1 == 1 {
            if attacks_of[a] & mask != 0 {
                return false;
            }
            attacked |= attacks_of[a];
        }
    }
    (0..n).all(|a| mask >> a & 1 == 0 || attackers_of[a] & !attacked == 0)
}

/// All preferred extensions, by exhaustive enumeration. Frameworks beyond
/// [`AF_ORACLE_CAP`] arguments are rejected.
pub fn af_oracle(af: &ArgumentationFramework) -> Result<Vec<BTreeSet<usize>>, ProblemError> {
    let n = af.num_arguments();
    if n > AF_ORACLE_CAP {
        return Err(ProblemError::CapExceeded {
            size: n,
            cap: AF_ORACLE_CAP,
        });
    }
    let mut attacks_of = vec![0u32; n];
    let mut attackers_of = vec![0u32; n];
    for (a, b) in af.attacks() {
        attacks_of[a] |= 1 << b;
        attackers_of[b] |= 1 << a;
    }
    let mut admissible: Vec<u32> = (0..1u64 << n)
        .map(|m| m as u32)
        .filter(|&m| admissible_mask(n, &attacks_of, &attackers_of, m))
        .collect();
    // any admissible set extends to a maximal one, so scanning by
    // descending size lets earlier kept sets witness non-maximality
    admissible.sort_by_key(|m| std::cmp::Reverse(m.count_ones()));
    let mut preferred: Vec<u32> = Vec::new();
    for &m in &admissible {
        if !preferred.iter().any(|&q| q & m == m && q != m) {
            preferred.push(m);
        }
    }
    preferred.sort_unstable();
    Ok(preferred
        .into_iter()
        .map(|m| (0..n).filter(|&a| m >> a & 1 == 1).collect())
        .collect())
}

/// Builds the framework whose skeptical acceptance of the distinguished
/// argument decides the given ∀∃ formula: one argument per clause attacking
/// the distinguished argument, mutually attacking argument pairs for the
/// two polarities of every variable (attacking the clauses they satisfy),
/// and a three-cycle hung off the distinguished argument whose entry point
/// suppresses the existential-variable polarities.
pub fn generate_af_from_qbf(
    q: &QbfFormula,
) -> Result<(ArgumentationFramework, usize), ProblemError> {
    let (_, existential) = split_forall_exists(q).map_err(ProblemError::UnsupportedPrefix)?;
    let f = q.matrix();
    let n = f.num_vars() as usize;
    let m = f.num_clauses();
    let mut af = ArgumentationFramework::new();
    let phi = af.add_argument("phi")?;
    let mut pos = vec![0usize; n + 1];
    let mut neg = vec![0usize; n + 1];
    for i in 1..=n {
        pos[i] = af.add_argument(&format!("x{i}"))?;
        neg[i] = af.add_argument(&format!("nx{i}"))?;
    }
    let mut clause_arg = Vec::with_capacity(m);
    for j in 0..m {
        clause_arg.push(af.add_argument(&format!("c{}", j + 1))?);
    }
    let b1 = af.add_argument("b1")?;
    let b2 = af.add_argument("b2")?;
    let b3 = af.add_argument("b3")?;

    for j in 0..m {
        af.add_attack(clause_arg[j], phi)?;
        for &l in &f.clause(j).literals {
            let i = l.var().get() as usize;
            let arg = if l.is_positive() { pos[i] } else { neg[i] };
            af.add_attack(arg, clause_arg[j])?;
        }
    }
    for i in 1..=n {
        af.add_attack(pos[i], neg[i])?;
        af.add_attack(neg[i], pos[i])?;
    }
    for b in [b1, b2, b3] {
        af.add_attack(phi, b)?;
    }
    af.add_attack(b1, b2)?;
    af.add_attack(b2, b3)?;
    af.add_attack(b3, b1)?;
    for v in &existential {
        let i = v.get() as usize;
        af.add_attack(b1, pos[i])?;
        af.add_attack(b1, neg[i])?;
    }
    Ok((af, phi))
}

/// Transfers a decomposition of the input formula's primal graph to the
/// attack graph produced by [`generate_af_from_qbf`]: each variable's bag
/// gains the paired polarity argument, the distinguished argument and the
/// three cycle arguments join every bag, and each clause argument hangs off
/// a bag holding its literals. For input width `k` the result has width at
/// most `2k + 5`.
pub fn af_decomposition_from_qbf(
    q: &QbfFormula,
    d: &TreeDecomposition,
) -> Result<TreeDecomposition, ProblemError> {
    let f = q.matrix();
    let report = d.validate(&crate::cnf::primal_graph(f));
    if !report.is_ok() {
        return Err(ProblemError::InvalidDecomposition(report.violations));
    }
    let n = f.num_vars() as usize;
    let m = f.num_clauses();
    // argument ids in generator order, shifted to graph vertices (+1)
    let phi_v = 1u32;
    let pos_v = |i: usize| 2 * i as u32;
    let neg_v = |i: usize| 2 * i as u32 + 1;
    let clause_v = |j: usize| (2 * n + 2 + j) as u32;
    let b_v = [(2 * n + m + 2) as u32, (2 * n + m + 3) as u32, (2 * n + m + 4) as u32];

    let interior = d.num_nodes().max(1);
    let mut bags: Vec<Vec<u32>> = (0..interior)
        .map(|t| {
            let mut bag: Vec<u32> = if t < d.num_nodes() {
                d.bag(t)
                    .iter()
                    .flat_map(|&v| [pos_v(v as usize), neg_v(v as usize)])
                    .collect()
            } else {
                Vec::new()
            };
            bag.push(phi_v);
            bag.extend_from_slice(&b_v);
            bag
        })
        .collect();
    let mut leaves: Vec<(usize, Vec<u32>)> = Vec::new();
    for j in 0..m {
        let vars: Vec<u32> = f.clause(j).literals.iter().map(|l| l.var().get()).collect();
        let host = (0..interior)
            .find(|&t| {
                t < d.num_nodes() && vars.iter().all(|v| d.bag(t).binary_search(v).is_ok())
                    || t >= d.num_nodes() && vars.is_empty()
            })
            .or_else(|| vars.is_empty().then_some(0))
            .expect("primal decomposition holds every clause's variables together");
        let mut bag = vec![clause_v(j), phi_v];
        for &l in &f.clause(j).literals {
            let i = l.var().get() as usize;
            bag.push(if l.is_positive() { pos_v(i) } else { neg_v(i) });
        }
        leaves.push((host, bag));
    }

    let mut out = TreeDecomposition::new(2 * n + m + 4);
    for mut bag in bags.drain(..) {
        bag.sort_unstable();
        bag.dedup();
        out.add_bag(bag);
    }
    for &(s, t) in d.tree_edges() {
        out.add_edge(s, t);
    }
    for (host, mut bag) in leaves {
        bag.sort_unstable();
        bag.dedup();
        let leaf = out.add_bag(bag);
        out.add_edge(host, leaf);
    }
    Ok(out)
}
