//! Elitist genetic search for noisy n -> k circuits.
//!
//! Run with `cargo run --release --example genetic_search`.

use distil::bellsim::NoiseModel;
use distil::evolve::{evolve, GaConfig};

fn main() -> distil::Result<()> {
    let noise = NoiseModel::new(0.01, 0.01)?;
    let cfg = GaConfig { population: 100, children_per_pair: 30, max_generations: 40, seed: 7, ..GaConfig::default() };
    for n in [2, 3, 4] {
        let run = evolve(n, 1, 0.85, &noise, &cfg)?;
        println!(
            "{n} -> 1: F_out={:.6} p_succ={:.4} after {} generations ({:?})",
            run.best_fitness,
            run.best_success_probability,
            run.history.len(),
            run.stop_reason
        );
        println!("  {}", run.best);
    }
    Ok(())
}
