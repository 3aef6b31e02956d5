//! Compile a graph into a bilocal circuit and search for a cheaper equivalent.
//!
//! Run with `cargo run --release --example circuit_synthesis`.

use distil::circuit::{heuristic_search, synthesize, Objective, SearchConfig};
use distil::fixtures;
use distil::graph::NKGraph;

fn main() -> distil::Result<()> {
    let g = NKGraph::from_json(fixtures::TEN_TO_SEVEN)?;
    let direct = synthesize(&g, &g.find_valid_labeling()?)?;
    println!("direct synthesis: {:?}", direct.metrics());
    for objective in [Objective::TwoQubit, Objective::Depth, Objective::KeepGates] {
        let cfg = SearchConfig { objective, budget: 100, ..SearchConfig::default() };
        let found = heuristic_search(&g, &cfg)?;
        println!("{objective:?} search: {:?}", found.metrics);
    }
    let best = heuristic_search(&g, &SearchConfig { budget: 100, ..SearchConfig::default() })?;
    println!("\n{}", best.circuit.to_json());
    Ok(())
}
