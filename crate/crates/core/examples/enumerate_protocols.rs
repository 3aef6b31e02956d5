//! One protocol per statistics class, by graph orbits and by symplectic normal forms.
//!
//! Run with `cargo run --release --example enumerate_protocols`.

use distil::enumerate::{key_set, pareto_envelope, transversal, EnumConfig, Strategy, SyndromePolicy};

fn main() -> distil::Result<()> {
    let cfg = EnumConfig::default();
    for (n, k) in [(2, 1), (3, 1), (4, 1), (3, 2), (4, 2)] {
        let graphs = transversal(Strategy::Graphs, n, k, &cfg)?;
        let forms = transversal(Strategy::NormalForms, n, k, &cfg)?;
        let agree = key_set(&graphs) == key_set(&forms);
        println!("({n},{k}): {:>3} classes, strategies agree: {agree}", graphs.len());
    }

    // Best trivial-syndrome fidelity per n at F = 0.8, and the hull of
    // (p_succ, F_out) trade-offs over every 5 -> 1 protocol.
    let f = 0.8;
    for n in 2..=6 {
        let records = transversal(Strategy::Graphs, n, 1, &cfg)?;
        let best = records.iter().map(|r| r.point(f)).max_by(|a, b| a.1.total_cmp(&b.1)).expect("non-empty");
        println!("{n} -> 1 at F={f}: best F_out={:.6} with p_succ={:.6}", best.1, best.0);
    }
    let records = transversal(Strategy::Graphs, 5, 1, &cfg)?;
    for policy in [SyndromePolicy::TrivialOnly, SyndromePolicy::AllSyndromeSets] {
        let env = &pareto_envelope(&records, &[0.9], policy)?[0];
        let hull: Vec<String> = env.hull.iter().map(|h| format!("({:.3}, {:.5})", h.p_succ, h.fidelity)).collect();
        println!("5 -> 1 hull at F=0.9, {policy:?}: {}", hull.join(" "));
    }
    Ok(())
}
