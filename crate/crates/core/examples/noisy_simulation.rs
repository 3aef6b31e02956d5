//! Bell-diagonal simulation of the n -> 1 circuits under gate and measurement noise.
//!
//! Run with `cargo run --release --example noisy_simulation`.

use distil::bellsim::{evaluate_fixture, NoiseModel};
use distil::fixtures;

fn main() -> distil::Result<()> {
    let noise_levels = [0.0, 0.005, 0.01, 0.02, 0.03, 0.045];
    for f_in in [0.7, 0.9, 0.95] {
        println!("F_in = {f_in}  (columns: p_g = p_m = {noise_levels:?})");
        for &(n, name) in fixtures::N_TO_ONE {
            let row = noise_levels
                .iter()
                .map(|&p| evaluate_fixture(name, f_in, &NoiseModel::new(p, p)?).map(|f| format!("{f:.5}")))
                .collect::<distil::Result<Vec<_>>>()?;
            println!("  {n} -> 1  {}", row.join("  "));
        }
    }
    Ok(())
}
