//! Local-complementation classes of connected graphs and the cache layout.
//!
//! Run with `cargo run --release --example orbit_database`.

use distil::graph::orbit::{format_orbit_db, generate_lc_classes, lc_class_representatives};

fn main() -> distil::Result<()> {
    let generated = generate_lc_classes(7)?;
    for (i, reps) in generated.iter().enumerate() {
        let shipped = lc_class_representatives(i + 1)?;
        println!("{} vertices: {:>3} classes, matches shipped table: {}", i + 1, reps.len(), *reps == shipped);
    }
    println!("\nfirst lines of the 6-vertex database:\n{}", format_orbit_db(&generated[5][..3]));
    Ok(())
}
