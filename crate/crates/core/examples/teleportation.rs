//! Teleporting a Steane-encoded qubit with raw, 10 -> 7 distilled or DEJMPS pairs.
//!
//! Run with `cargo run --release --example teleportation`.

use distil::apps::{teleportation_curves, ten_to_seven_statistics};

fn main() -> distil::Result<()> {
    let stats = ten_to_seven_statistics()?;
    let grid: Vec<f64> = (0..=6).map(|i| 0.70 + 0.05 * i as f64).collect();
    println!("  F_in  strategy       logical infidelity  raw pairs per attempt");
    for p in teleportation_curves(&stats, &grid)? {
        println!("  {:.2}  {:<13?}  {:>18.6}  {:>21.3}", p.f_in, p.strategy, p.infidelity, p.expected_pairs);
    }
    Ok(())
}
