//! Bilocal Clifford circuits: synthesis from graphs, metrics and rewrites.
//!
//! Circuits are written single-sided: qubit `q` stands for the pair `q` and a
//! gate on it is applied bilaterally. Qubits `0..keep` are kept, the rest are
//! measured in the Z basis exactly once.

pub mod coloring;
pub mod depth;
pub mod search;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Labeling, NKGraph};
use crate::pauli::MAX_QUBITS;
use crate::symplectic::{Gate, SymplecticMatrix};

pub use depth::{Depth, EXACT_DEPTH_LIMIT};
pub use search::{heuristic_search, Objective, SearchConfig, SearchResult};

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum CircuitGate {
    Cz(usize, usize),
    Cnot { control: usize, target: usize },
    H(usize),
    MeasureZ(usize),
}

impl CircuitGate {
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            CircuitGate::Cz(a, b) => vec![a, b],
            CircuitGate::Cnot { control, target } => vec![control, target],
            CircuitGate::H(q) | CircuitGate::MeasureZ(q) => vec![q],
        }
    }

    pub fn is_two_qubit(&self) -> bool {
        matches!(self, CircuitGate::Cz(..) | CircuitGate::Cnot { .. })
    }

    /// The unitary part as a symplectic generator; `None` for measurements.
    pub fn unitary(&self) -> Option<Gate> {
        match *self {
            CircuitGate::Cz(a, b) => Some(Gate::Cz(a, b)),
            CircuitGate::Cnot { control, target } => Some(Gate::Cnot { control, target }),
            CircuitGate::H(q) => Some(Gate::H(q)),
            CircuitGate::MeasureZ(_) => None,
        }
    }

    /// Whether the two gates can be swapped when adjacent.
    pub fn commutes_with(&self, other: &CircuitGate) -> bool {
        use CircuitGate::*;
        let (a, b) = (self.qubits(), other.qubits());
        if !a.iter().any(|q| b.contains(q)) {
            return true;
        }
        match (*self, *other) {
            (Cz(..), Cz(..)) => true,
            (Cnot { control: c1, target: t1 }, Cnot { control: c2, target: t2 }) => t1 != c2 && c1 != t2,
            (Cz(x, y), Cnot { target, .. }) | (Cnot { target, .. }, Cz(x, y)) => target != x && target != y,
            (H(p), H(q)) => p == q,
            _ => false,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct GateRecord {
    #[serde(rename = "type")]
    kind: String,
    q: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct CircuitFile {
    n: usize,
    keep: usize,
    gates: Vec<GateRecord>,
}

impl GateRecord {
    fn to_gate(&self) -> Result<CircuitGate> {
        let arity = |m: usize| {
            if self.q.len() == m {
                Ok(())
            } else {
                Err(Error::Parse(format!("{} expects {m} qubits, got {}", self.kind, self.q.len())))
            }
        };
        match self.kind.as_str() {
            "CZ" => arity(2).map(|_| CircuitGate::Cz(self.q[0], self.q[1])),
            "CNOT" => arity(2).map(|_| CircuitGate::Cnot { control: self.q[0], target: self.q[1] }),
            "H" => arity(1).map(|_| CircuitGate::H(self.q[0])),
            "MZ" => arity(1).map(|_| CircuitGate::MeasureZ(self.q[0])),
            other => Err(Error::UnsupportedGate(other.to_string())),
        }
    }

    fn from_gate(g: &CircuitGate) -> Self {
        let kind = match g {
            CircuitGate::Cz(..) => "CZ",
            CircuitGate::Cnot { .. } => "CNOT",
            CircuitGate::H(_) => "H",
            CircuitGate::MeasureZ(_) => "MZ",
        };
        GateRecord { kind: kind.to_string(), q: g.qubits() }
    }
}

/// A distillation circuit with measured qubits `keep..n`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Circuit {
    n: usize,
    keep: usize,
    gates: Vec<CircuitGate>,
}

/// Summary numbers of a circuit.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub struct CircuitMetrics {
    pub two_qubit_count: usize,
    pub depth: usize,
    pub depth_exact: bool,
    pub keep_gate_count: usize,
    pub cz_depth: usize,
}

impl Circuit {
    pub fn new(n: usize, keep: usize, gates: Vec<CircuitGate>) -> Result<Self> {
        let c = Circuit { n, keep, gates };
        c.validate()?;
        Ok(c)
    }

    fn validate(&self) -> Result<()> {
        if self.n > MAX_QUBITS {
            return Err(Error::SizeLimit(format!("{} qubits exceeds {MAX_QUBITS}", self.n)));
        }
        if self.keep > self.n {
            return Err(Error::Dimension(format!("keep {} > n {}", self.keep, self.n)));
        }
        let mut measured = vec![false; self.n];
        for g in &self.gates {
            let qs = g.qubits();
            if let Some(&q) = qs.iter().find(|&&q| q >= self.n) {
                return Err(Error::Index(format!("qubit {q} out of range for n={}", self.n)));
            }
            if qs.len() == 2 && qs[0] == qs[1] {
                return Err(Error::Index(format!("two-qubit gate on a single qubit {}", qs[0])));
            }
            if let Some(&q) = qs.iter().find(|&&q| measured[q]) {
                return Err(Error::InvalidInput(format!("gate {g:?} acts on qubit {q} after its measurement")));
            }
            if let CircuitGate::MeasureZ(q) = *g {
                if q < self.keep {
                    return Err(Error::InvalidInput(format!("kept qubit {q} is measured")));
                }
                measured[q] = true;
            }
        }
        if let Some(q) = (self.keep..self.n).find(|&q| !measured[q]) {
            return Err(Error::InvalidInput(format!("qubit {q} is never measured")));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn keep(&self) -> usize {
        self.keep
    }

    pub fn gates(&self) -> &[CircuitGate] {
        &self.gates
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: CircuitFile = serde_json::from_str(text)?;
        let gates = f.gates.iter().map(GateRecord::to_gate).collect::<Result<_>>()?;
        Circuit::new(f.n, f.keep, gates)
    }

    pub fn to_json(&self) -> String {
        let f = CircuitFile {
            n: self.n,
            keep: self.keep,
            gates: self.gates.iter().map(GateRecord::from_gate).collect(),
        };
        serde_json::to_string(&f).expect("circuit serialises")
    }

    /// Symplectic action of the unitary part on Pauli errors.
    pub fn to_symplectic(&self) -> SymplecticMatrix {
        self.gates.iter().filter_map(CircuitGate::unitary).fold(SymplecticMatrix::identity(self.n), |m, g| m.then_gate(g))
    }

    pub fn two_qubit_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_two_qubit()).count()
    }

    /// Two-qubit gates touching at least one kept qubit.
    pub fn keep_gate_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_two_qubit() && g.qubits().iter().any(|&q| q < self.keep)).count()
    }

    /// Edges of the CZ gates, in circuit order.
    pub fn cz_edges(&self) -> Vec<(usize, usize)> {
        self.gates
            .iter()
            .filter_map(|g| match *g {
                CircuitGate::Cz(a, b) => Some((a.min(b), a.max(b))),
                _ => None,
            })
            .collect()
    }

    pub fn depth(&self) -> Depth {
        depth::depth(&self.gates)
    }

    pub fn metrics(&self) -> CircuitMetrics {
        let d = self.depth();
        CircuitMetrics {
            two_qubit_count: self.two_qubit_count(),
            depth: d.value,
            depth_exact: d.exact,
            keep_gate_count: self.keep_gate_count(),
            cz_depth: coloring::edge_chromatic_depth(&self.cz_edges()),
        }
    }
}

/// Symplectic action of a circuit's unitary part.
pub fn circuit_to_symplectic(c: &Circuit) -> SymplecticMatrix {
    c.to_symplectic()
}

/// Symmetric CZ pattern stored as adjacency rows.
pub(crate) type CzRows = Vec<u32>;

fn toggle_cz(rows: &mut CzRows, a: usize, b: usize) {
    rows[a] ^= 1 << b;
    rows[b] ^= 1 << a;
}

/// Move a CZ pattern across `CNOT(control, target)` (either direction; the
/// CNOT's action on `x` is an involution). Single-qubit phases are dropped.
fn conjugate_by_cnot(rows: &mut CzRows, control: usize, target: usize) {
    for r in rows.iter_mut() {
        *r ^= ((*r >> target) & 1) << control;
    }
    rows[control] ^= rows[target];
    for (i, r) in rows.iter_mut().enumerate() {
        *r &= !(1 << i);
    }
}

fn cz_gates(rows: &CzRows, filter: impl Fn(usize, usize) -> bool) -> Vec<CircuitGate> {
    let mut out = Vec::new();
    for a in 0..rows.len() {
        for b in a + 1..rows.len() {
            if rows[a] >> b & 1 == 1 && filter(a, b) {
                out.push(CircuitGate::Cz(a, b));
            }
        }
    }
    out
}

/// CZ patterns interleaved with a CNOT sequence, followed by `H` and `MZ` on
/// the measured qubits: `slots[0]`, `cnots[0]`, `slots[1]`, ..., `slots[m]`.
///
/// Direct synthesis fills only the first slot; the commuted form only the last.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct LayeredCircuit {
    pub n: usize,
    pub keep: usize,
    pub cnots: Vec<(usize, usize)>,
    pub slots: Vec<CzRows>,
}

fn cnot_gate((control, target): (usize, usize)) -> CircuitGate {
    CircuitGate::Cnot { control, target }
}

impl LayeredCircuit {
    pub fn to_circuit(&self) -> Circuit {
        let mut gates = cz_gates(&self.slots[0], |_, _| true);
        for (i, &g) in self.cnots.iter().enumerate() {
            gates.push(cnot_gate(g));
            gates.extend(cz_gates(&self.slots[i + 1], |_, _| true));
        }
        gates.extend((self.keep..self.n).map(CircuitGate::H));
        gates.extend((self.keep..self.n).map(CircuitGate::MeasureZ));
        Circuit::new(self.n, self.keep, gates).expect("layered circuits are valid")
    }

    fn last(&self) -> usize {
        self.cnots.len()
    }

    fn empty_slot(&self) -> CzRows {
        vec![0; self.n]
    }

    /// All CZs pushed past every CNOT; keep-keep CZs at the end are dropped.
    pub fn commuted(&self) -> LayeredCircuit {
        let mut carry = self.slots[0].clone();
        for (i, &(c, t)) in self.cnots.iter().enumerate() {
            conjugate_by_cnot(&mut carry, c, t);
            xor_into(&mut carry, &self.slots[i + 1]);
        }
        self.drop_keep_keep(&mut carry);
        let mut slots = vec![self.empty_slot(); self.last() + 1];
        slots[self.last()] = carry;
        LayeredCircuit { slots, ..self.clone() }
    }

    fn drop_keep_keep(&self, rows: &mut CzRows) {
        let keep_mask = (1u32 << self.keep) - 1;
        for r in rows.iter_mut().take(self.keep) {
            *r &= !keep_mask;
        }
    }

    fn cz_commutes_with_cnot(&self, a: usize, b: usize, i: usize) -> bool {
        let t = self.cnots[i].1;
        t != a && t != b
    }

    /// Move every CZ to the earliest slot it reaches without byproducts,
    /// cancelling duplicates, after dropping keep-keep CZs that could slide to the end.
    pub fn normalize(&mut self) {
        let m = self.last();
        for s in 0..=m {
            for a in 0..self.keep {
                for b in a + 1..self.keep {
                    if self.slots[s][a] >> b & 1 == 1 && (s..m).all(|i| self.cz_commutes_with_cnot(a, b, i)) {
                        toggle_cz(&mut self.slots[s], a, b);
                    }
                }
            }
        }
        for s in 1..=m {
            for a in 0..self.n {
                for b in a + 1..self.n {
                    if self.slots[s][a] >> b & 1 == 0 {
                        continue;
                    }
                    let mut to = s;
                    while to > 0 && self.cz_commutes_with_cnot(a, b, to - 1) {
                        to -= 1;
                    }
                    if to < s {
                        toggle_cz(&mut self.slots[s], a, b);
                        toggle_cz(&mut self.slots[to], a, b);
                    }
                }
            }
        }
    }

    /// Append `CNOT(control, target)` on measured qubits before the
    /// measurement layer and move it in front of the trailing CZs.
    pub fn insert_meas_cnot(&self, control: usize, target: usize) -> Result<LayeredCircuit> {
        check_meas_pair(self.n, self.keep, control, target)?;
        let mut out = self.clone();
        let mut moved = out.slots[self.last()].clone();
        conjugate_by_cnot(&mut moved, control, target);
        out.slots[self.last()] = self.empty_slot();
        out.slots.push(moved);
        out.cnots.push((control, target));
        Ok(out)
    }

    /// Move CZ `(a, b)` from slot `from` to slot `to`, carrying byproduct CZs along.
    pub fn move_cz(&self, a: usize, b: usize, from: usize, to: usize) -> Result<LayeredCircuit> {
        if from >= self.slots.len() || to >= self.slots.len() || a >= self.n || b >= self.n {
            return Err(Error::Index(format!("slot or qubit out of range in ({a}, {b}) {from} -> {to}")));
        }
        if self.slots[from][a] >> b & 1 == 0 {
            return Err(Error::InvalidMove(format!("no CZ on ({a}, {b}) in slot {from}")));
        }
        let mut out = self.clone();
        toggle_cz(&mut out.slots[from], a, b);
        let mut single = self.empty_slot();
        toggle_cz(&mut single, a, b);
        if to > from {
            for &(c, t) in &self.cnots[from..to] {
                conjugate_by_cnot(&mut single, c, t);
            }
        } else {
            for &(c, t) in self.cnots[to..from].iter().rev() {
                conjugate_by_cnot(&mut single, c, t);
            }
        }
        xor_into(&mut out.slots[to], &single);
        Ok(out)
    }

    /// Swap CNOTs `i` and `i + 1` when they commute; the CZs between them move
    /// past the one going earlier.
    pub fn swap_cnots(&self, i: usize) -> Result<LayeredCircuit> {
        if i + 1 >= self.cnots.len() {
            return Err(Error::Index(format!("no CNOT pair at {i}")));
        }
        let (g, h) = (self.cnots[i], self.cnots[i + 1]);
        if !cnot_gate(g).commutes_with(&cnot_gate(h)) {
            return Err(Error::InvalidMove(format!("CNOTs {g:?} and {h:?} do not commute")));
        }
        let mut out = self.clone();
        let mut between = std::mem::replace(&mut out.slots[i + 1], self.empty_slot());
        conjugate_by_cnot(&mut between, h.0, h.1);
        xor_into(&mut out.slots[i + 2], &between);
        out.cnots.swap(i, i + 1);
        Ok(out)
    }

    /// CZ gates as `(slot, a, b)`.
    pub fn cz_positions(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for (s, rows) in self.slots.iter().enumerate() {
            for (a, &row) in rows.iter().enumerate().take(self.n) {
                for b in a + 1..self.n {
                    if row >> b & 1 == 1 {
                        out.push((s, a, b));
                    }
                }
            }
        }
        out
    }

    pub fn cz_edges(&self) -> Vec<(usize, usize)> {
        self.cz_positions().into_iter().map(|(_, a, b)| (a, b)).collect()
    }

    /// Depth when slots and the CNOT sequence run one after another:
    /// chromatic index of each CZ slot, the CNOT depth, and the `H` layer.
    pub fn block_depth(&self) -> usize {
        let positions = self.cz_positions();
        let cz: usize = (0..self.slots.len())
            .map(|s| {
                let edges: Vec<(usize, usize)> =
                    positions.iter().filter(|p| p.0 == s).map(|&(_, a, b)| (a, b)).collect();
                coloring::chromatic_index(&edges)
            })
            .sum();
        let gates: Vec<CircuitGate> = self.cnots.iter().copied().map(cnot_gate).collect();
        cz + depth::depth(&gates).value + usize::from(self.keep < self.n)
    }
}

fn xor_into(dst: &mut CzRows, src: &CzRows) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= s;
    }
}

fn check_meas_pair(n: usize, keep: usize, control: usize, target: usize) -> Result<()> {
    for q in [control, target] {
        if q >= n {
            return Err(Error::Index(format!("qubit {q} out of range for n={n}")));
        }
        if q < keep {
            return Err(Error::InvalidMove(format!("qubit {q} is kept, not measured")));
        }
    }
    if control == target {
        return Err(Error::InvalidMove(format!("CNOT on a single qubit {control}")));
    }
    Ok(())
}

/// Layered form of the direct synthesis of `g` under `labeling`.
pub fn synthesize_layered(g: &NKGraph, labeling: &Labeling) -> Result<LayeredCircuit> {
    let (n, k) = (g.n_out(), g.k_in());
    if n > MAX_QUBITS {
        return Err(Error::SizeLimit(format!("{n} qubits exceeds {MAX_QUBITS}")));
    }
    let rt = g.reduced_codewords(labeling)?;
    let gamma = g.output_adjacency(labeling);
    let mut cnots = Vec::new();
    for (i, &row) in rt.rows.iter().enumerate() {
        for j in 0..n - k {
            if row >> j & 1 == 1 {
                cnots.push((k + j, i));
            }
        }
    }
    let mut slots = vec![vec![0; n]; cnots.len() + 1];
    slots[0] = gamma.rows;
    Ok(LayeredCircuit { n, keep: k, cnots, slots })
}

/// CZ per output edge, CNOT per non-zero entry of the reduced codeword block,
/// then `H` and `MZ` on measured qubits. Qubit `p` is `labeling.output_order[p]`.
pub fn synthesize(g: &NKGraph, labeling: &Labeling) -> Result<Circuit> {
    Ok(synthesize_layered(g, labeling)?.to_circuit())
}

/// Direction of [`rewrite_commute`].
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum CommuteDirection {
    /// Move CZs later, past the CNOTs; keep-keep CZs left at the end are dropped.
    CnotsFirst,
    /// Move CZs earlier, before the CNOTs.
    CzsFirst,
}

/// Rewrite with the CZ/CNOT commutation relations, merging byproduct CZs.
///
/// CZs are carried along as a pattern and emitted only where they cannot move
/// further: next to an `H` or `MZ` on one of their qubits, or at the end.
pub fn rewrite_commute(c: &Circuit, direction: CommuteDirection) -> Circuit {
    let gates = match direction {
        CommuteDirection::CnotsFirst => sweep(&c.gates, c.n, c.keep, true),
        CommuteDirection::CzsFirst => {
            let rev: Vec<CircuitGate> = c.gates.iter().rev().copied().collect();
            let mut out = sweep(&rev, c.n, c.keep, false);
            out.reverse();
            out
        }
    };
    Circuit::new(c.n, c.keep, gates).expect("rewriting preserves validity")
}

fn sweep(gates: &[CircuitGate], n: usize, keep: usize, drop_keep_keep: bool) -> Vec<CircuitGate> {
    let mut carried: CzRows = vec![0; n];
    let mut out = Vec::with_capacity(gates.len());
    for &g in gates {
        match g {
            CircuitGate::Cz(a, b) => toggle_cz(&mut carried, a, b),
            CircuitGate::Cnot { control, target } => {
                conjugate_by_cnot(&mut carried, control, target);
                out.push(g);
            }
            CircuitGate::H(q) | CircuitGate::MeasureZ(q) => {
                let touching: Vec<CircuitGate> = cz_gates(&carried, |a, b| a == q || b == q);
                for &t in &touching {
                    if let CircuitGate::Cz(a, b) = t {
                        toggle_cz(&mut carried, a, b);
                    }
                }
                out.extend(touching);
                out.push(g);
            }
        }
    }
    let tail = cz_gates(&carried, |a, b| !(drop_keep_keep && a < keep && b < keep));
    // remaining CZs go before the trailing H/MZ run, which never touches them
    let split = out
        .iter()
        .rposition(|g| matches!(g, CircuitGate::Cz(..) | CircuitGate::Cnot { .. }))
        .map_or(0, |i| i + 1);
    let trailing_ok = out[split..].iter().all(|g| g.qubits().iter().all(|&q| carried[q] == 0));
    if trailing_ok {
        out.splice(split..split, tail);
    } else {
        out.extend(tail);
    }
    out
}

/// Insert `CNOT(control, target)` on measured qubits just before the final
/// measurement layer and move it in front of the trailing CZ block.
pub fn insert_meas_cnot(c: &Circuit, control: usize, target: usize) -> Result<Circuit> {
    check_meas_pair(c.n, c.keep, control, target)?;
    let end = c
        .gates
        .iter()
        .rposition(|g| g.is_two_qubit())
        .map_or(0, |i| i + 1);
    if c.gates[..end].iter().any(|g| {
        matches!(g, CircuitGate::H(q) | CircuitGate::MeasureZ(q) if *q == control || *q == target)
    }) {
        return Err(Error::InvalidMove("qubits are measured before the final layer".into()));
    }
    let start = c.gates[..end]
        .iter()
        .rposition(|g| !matches!(g, CircuitGate::Cz(..)))
        .map_or(0, |i| i + 1);
    let mut block: CzRows = vec![0; c.n];
    for g in &c.gates[start..end] {
        if let CircuitGate::Cz(a, b) = *g {
            toggle_cz(&mut block, a, b);
        }
    }
    conjugate_by_cnot(&mut block, control, target);
    let mut gates = c.gates[..start].to_vec();
    gates.push(CircuitGate::Cnot { control, target });
    gates.extend(cz_gates(&block, |_, _| true));
    gates.extend_from_slice(&c.gates[end..]);
    Circuit::new(c.n, c.keep, gates)
}
