//! Graphs, circuits and orbit tables shipped with the crate.
//!
//! Graph files use the `{"graph6", "inputs"}` envelope and circuit files the
//! `{"n", "keep", "gates"}` format, both with 0-based vertex and qubit indices.

use crate::error::{Error, Result};

/// The `[4, 2, 2]` graph transcribed verbatim: a square with each input on a diagonal.
pub const FOUR_TWO_TWO: &str = include_str!("../fixtures/graphs/four_two_two.json");
/// Square with each input on an adjacent pair of corners: a distance-2 `[4, 2, 2]` code.
pub const FOUR_TWO_TWO_ADJACENT: &str = include_str!("../fixtures/graphs/four_two_two_adjacent.json");
/// A `(4, 2)`-graph whose two inputs share all output neighbours.
pub const DEPENDENT_INPUTS: &str = include_str!("../fixtures/graphs/dependent_inputs.json");
/// The worked graph-to-circuit example with neighbourhoods `Z1 Z3 Z4` and `Z2 Z3`.
pub const GRAPH_TO_CIRCUIT: &str = include_str!("../fixtures/graphs/graph_to_circuit.json");
/// Its image under local complementation at output vertex 2 (1-based).
pub const GRAPH_TO_CIRCUIT_LC: &str = include_str!("../fixtures/graphs/graph_to_circuit_lc.json");
/// Five-qubit code as a wheel whose centre is the input.
pub const FIVE_QUBIT_WHEEL: &str = include_str!("../fixtures/graphs/five_qubit_wheel.json");
/// Five-qubit code graph with the labelled vertex order used for circuit rewriting.
pub const FIVE_QUBIT_LABELLED: &str = include_str!("../fixtures/graphs/five_qubit_labelled.json");
/// The `(10, 7)`-graph used for encoded teleportation.
pub const TEN_TO_SEVEN: &str = include_str!("../fixtures/graphs/ten_to_seven.json");
/// A `(4, 2)`-graph used to illustrate input and output extensions.
pub const EXTENSION_BASE: &str = include_str!("../fixtures/graphs/extension_base.json");

pub const GRAPHS: &[(&str, &str)] = &[
    ("four_two_two", FOUR_TWO_TWO),
    ("four_two_two_adjacent", FOUR_TWO_TWO_ADJACENT),
    ("dependent_inputs", DEPENDENT_INPUTS),
    ("graph_to_circuit", GRAPH_TO_CIRCUIT),
    ("graph_to_circuit_lc", GRAPH_TO_CIRCUIT_LC),
    ("five_qubit_wheel", FIVE_QUBIT_WHEEL),
    ("five_qubit_labelled", FIVE_QUBIT_LABELLED),
    ("ten_to_seven", TEN_TO_SEVEN),
    ("extension_base", EXTENSION_BASE),
];

pub const CIRCUITS: &[(&str, &str)] = &[
    ("graph_to_circuit", include_str!("../fixtures/circuits/graph_to_circuit.json")),
    ("graph_to_circuit_lc", include_str!("../fixtures/circuits/graph_to_circuit_lc.json")),
    ("five_qubit_direct", include_str!("../fixtures/circuits/five_qubit_direct.json")),
    ("five_qubit_commuted", include_str!("../fixtures/circuits/five_qubit_commuted.json")),
    ("five_qubit_depth_reduced", include_str!("../fixtures/circuits/five_qubit_depth_reduced.json")),
    ("ten_to_seven", include_str!("../fixtures/circuits/ten_to_seven.json")),
    ("four_to_one", include_str!("../fixtures/circuits/four_to_one.json")),
    ("five_to_one", include_str!("../fixtures/circuits/five_to_one.json")),
    ("six_to_one", include_str!("../fixtures/circuits/six_to_one.json")),
    ("seven_to_one", include_str!("../fixtures/circuits/seven_to_one.json")),
    ("eight_to_one", include_str!("../fixtures/circuits/eight_to_one.json")),
    ("nine_to_one", include_str!("../fixtures/circuits/nine_to_one.json")),
];

/// The `n -> 1` circuits for `n = 4..=9`.
pub const N_TO_ONE: &[(usize, &str)] = &[
    (4, "four_to_one"),
    (5, "five_to_one"),
    (6, "six_to_one"),
    (7, "seven_to_one"),
    (8, "eight_to_one"),
    (9, "nine_to_one"),
];

const LC_CLASSES: [&str; 10] = [
    include_str!("../fixtures/orbits/lc_classes_1.g6"),
    include_str!("../fixtures/orbits/lc_classes_2.g6"),
    include_str!("../fixtures/orbits/lc_classes_3.g6"),
    include_str!("../fixtures/orbits/lc_classes_4.g6"),
    include_str!("../fixtures/orbits/lc_classes_5.g6"),
    include_str!("../fixtures/orbits/lc_classes_6.g6"),
    include_str!("../fixtures/orbits/lc_classes_7.g6"),
    include_str!("../fixtures/orbits/lc_classes_8.g6"),
    include_str!("../fixtures/orbits/lc_classes_9.g6"),
    include_str!("../fixtures/orbits/lc_classes_10.g6"),
];

/// Shipped LC-class table for `n` vertices (newline-delimited graph6).
pub fn lc_classes(n: usize) -> Option<&'static str> {
    (1..=LC_CLASSES.len()).contains(&n).then(|| LC_CLASSES[n - 1])
}

pub fn graph(name: &str) -> Result<&'static str> {
    lookup(GRAPHS, name, "graph")
}

pub fn circuit(name: &str) -> Result<&'static str> {
    lookup(CIRCUITS, name, "circuit")
}

fn lookup(table: &[(&str, &'static str)], name: &str, what: &str) -> Result<&'static str> {
    table
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, s)| *s)
        .ok_or_else(|| Error::InvalidInput(format!("unknown {what} fixture {name:?}")))
}
