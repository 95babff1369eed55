use twqbf::cnf::{CnfFormula, Lit, Var};
use twqbf::qbf::{chen_solve_with, MatrixGraph, QbfFormula, QuantifierBlock, SolveOptions};
use twqbf::treedec::TreeDecomposition;

fn mix(z: u64) -> u64 {
    let mut z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn sign(salt: u64, i: u64, j: u64) -> bool {
    mix((salt << 42) ^ (i << 21) ^ j) & 1 == 1
}

fn build(n: usize, width: usize, clauses_per_window: u64, prefix_kind: u32) -> QbfFormula {
    let mut matrix = CnfFormula::new(n as u32);
    let windows = n - width;
    for i in 0..windows {
        for salt in 0..clauses_per_window {
            let clause = (0..=width)
                .map(|j| Lit::new(Var::new((i + j + 1) as u32), sign(salt, i as u64, j as u64)))
                .collect();
            matrix.add_clause(clause).unwrap();
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
    let prefix = match prefix_kind {
        0 => {
            let odd = (1..=n as u32).step_by(2).map(Var::new).collect();
            let even = (2..=n as u32).step_by(2).map(Var::new).collect();
            vec![QuantifierBlock::forall(odd), QuantifierBlock::exists(even)]
        }
        1 => {
            // three blocks by residue mod 3: E A E
            let r0 = (1..=n as u32).filter(|v| v % 3 == 1).map(Var::new).collect();
            let r1 = (1..=n as u32).filter(|v| v % 3 == 2).map(Var::new).collect();
            let r2 = (1..=n as u32).filter(|v| v % 3 == 0).map(Var::new).collect();
            vec![
                QuantifierBlock::exists(r0),
                QuantifierBlock::forall(r1),
                QuantifierBlock::exists(r2),
            ]
        }
        _ => {
            // A E A by residue mod 3
            let r0 = (1..=n as u32).filter(|v| v % 3 == 1).map(Var::new).collect();
            let r1 = (1..=n as u32).filter(|v| v % 3 == 2).map(Var::new).collect();
            let r2 = (1..=n as u32).filter(|v| v % 3 == 0).map(Var::new).collect();
            vec![
                QuantifierBlock::forall(r0),
                QuantifierBlock::exists(r1),
                QuantifierBlock::forall(r2),
            ]
        }
    };
    let mut q = QbfFormula::new(prefix, matrix).unwrap();
    q.attach_decomposition(MatrixGraph::Primal, d).unwrap();
    q
}

#[test]
fn probe() {
    let opts = SolveOptions::default();
    for (label, cpw, kind, n) in [
        ("6cl-EAE-n60", 6u64, 1u32, 60usize),
        ("6cl-EAE-n80", 6, 1, 80),
        ("6cl-EAE-n90", 6, 1, 90),
        ("6cl-EAE-n100", 6, 1, 100),
        ("6cl-EAE-n120", 6, 1, 120),
    ] {
        let mut line = format!("{label:14}");
        for k in 2usize..=6 {
            let t = std::time::Instant::now();
            let r = chen_solve_with(&build(n, k, cpw, kind), &opts);
            line.push_str(&format!(
                " k{k}: pf={:.1} mx={} v={} {}ms |",
                r.stats.node_ops as f64 / r.stats.forgets as f64,
                r.stats.max_constraint_nodes,
                r.value as u8,
                t.elapsed().as_millis()
            ));
        }
        println!("{line}");
    }
}
