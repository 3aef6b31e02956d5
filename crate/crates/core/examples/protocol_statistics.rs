//! Exact success probabilities and output states from weight enumerators.
//!
//! Run with `cargo run --example protocol_statistics`.

use distil::apps::{bilateral_cnot, graph_protocol};
use distil::fixtures;
use distil::graph::NKGraph;
use distil::pauli::label_string;
use distil::stats::{full_statistics, trivial_statistics, BellDiagonalInput, bell_diagonal_table, SyndromeMode};

fn main() -> distil::Result<()> {
    // The bilateral CNOT keeps one pair out of two.
    let s = trivial_statistics(&bilateral_cnot(), 1)?;
    println!("bilateral CNOT, Werner inputs:");
    println!("  success enumerator {:?}, identity numerator {:?}", s.denominator(0)?.0, s.numerator(0, 0)?.0);
    for f in [0.6, 0.7, 0.8, 0.9] {
        println!("  F={f:.1}  p_succ={:.6}  F_out={:.6}", s.success_probability_werner(0, f)?, s.fidelity_werner(0, f)?);
    }

    // Every syndrome of the five-qubit code, with its full output state.
    let g = NKGraph::from_json(fixtures::FIVE_QUBIT_WHEEL)?;
    let stats = full_statistics(&graph_protocol(&g)?, g.k_in())?;
    let table = stats.werner_table(0.9);
    println!("\nfive-qubit code at F=0.9 (syndrome, probability, I X Y Z coefficients):");
    for &b in &table.syndromes {
        let p = table.success_probability(b)?;
        let c = table.output_coefficients(b)?;
        let cells: Vec<String> = c.iter().map(|x| format!("{x:.4}")).collect();
        println!("  {b:04b}  {p:.5}  {}", cells.join(" "));
    }

    // Non-Werner inputs go through the joint label table.
    let input = BellDiagonalInput::new(vec![[0.85, 0.05, 0.02, 0.08]; 2])?;
    let t = bell_diagonal_table(&bilateral_cnot(), 1, &input, SyndromeMode::Trivial)?;
    let labels: Vec<String> = (0..4).map(|l| label_string(l, 1)).collect();
    println!("\nbilateral CNOT on a biased pair: p={:.5}", t.success_probability(0)?);
    for (l, c) in labels.iter().zip(t.output_coefficients(0)?) {
        println!("  {l}: {c:.5}");
    }
    Ok(())
}
