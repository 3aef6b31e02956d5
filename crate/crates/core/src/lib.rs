//! Bilocal Clifford entanglement distillation: enumeration of protocols through
//! graph codes, exact distillation statistics, circuit synthesis, Bell-diagonal
//! simulation with noise, a genetic optimizer and downstream evaluators.
//!
//! The crate is organised bottom-up:
//!
//! * [`pauli`], [`gf2`] and [`symplectic`] hold the GF(2) linear algebra;
//! * [`graph`] handles `(n, k)`-graphs, their equivalence moves and orbits;
//! * [`stats`] computes weight enumerators and everything derived from them;
//! * [`enumerate`] walks the protocol space with two independent strategies;
//! * [`circuit`] compiles graphs into gate lists and rewrites them;
//! * [`bellsim`] and [`evolve`] simulate and optimise noisy circuits;
//! * [`apps`] evaluates protocols for key distribution and teleportation.

pub mod apps;
pub mod bellsim;
pub mod circuit;
pub mod cli;
pub mod enumerate;
pub mod error;
pub mod evolve;

pub mod fixtures;
pub mod gf2;
pub mod graph;
pub mod io;
pub mod pauli;
pub mod stats;
pub mod symplectic;

pub use error::{Error, Result};
