//! Circuit depth with commutation-aware layering.
//!
//! Two gates are ordered only when they share a qubit and do not commute; any
//! schedule respecting that partial order implements the same operator. Depth
//! is the fewest layers of qubit-disjoint gates over all such schedules.
//! Measurements are not counted.

use super::CircuitGate;

/// Circuits with at most this many two-qubit gates get an exact depth.
pub const EXACT_DEPTH_LIMIT: usize = 20;

const NODE_BUDGET: u64 = 5_000_000;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Depth {
    pub value: usize,
    /// False when `value` is only an upper bound from a greedy schedule.
    pub exact: bool,
}

struct Dag {
    masks: Vec<u32>,
    preds: Vec<Vec<usize>>,
    tail: Vec<usize>,
}

impl Dag {
    fn new(gates: &[CircuitGate]) -> Dag {
        let m = gates.len();
        let masks: Vec<u32> = gates.iter().map(|g| g.qubits().iter().fold(0, |a, &q| a | 1 << q)).collect();
        let preds: Vec<Vec<usize>> = (0..m)
            .map(|j| (0..j).filter(|&i| masks[i] & masks[j] != 0 && !gates[i].commutes_with(&gates[j])).collect())
            .collect();
        let mut tail = vec![0usize; m];
        for j in (0..m).rev() {
            for &i in &preds[j] {
                tail[i] = tail[i].max(tail[j] + 1);
            }
        }
        Dag { masks, preds, tail }
    }

    fn lower_bound(&self) -> usize {
        let m = self.masks.len();
        let mut head = vec![0usize; m];
        for j in 0..m {
            head[j] = self.preds[j].iter().map(|&i| head[i] + 1).max().unwrap_or(0);
        }
        let path = (0..m).map(|i| head[i] + self.tail[i] + 1).max().unwrap_or(0);
        let load = (0..32).map(|q| self.masks.iter().filter(|&&mk| mk >> q & 1 == 1).count()).max().unwrap_or(0);
        path.max(load)
    }

    /// Greedy schedule: each gate in the earliest layer after its predecessors with free qubits.
    fn greedy(&self) -> usize {
        let mut layer = vec![0usize; self.masks.len()];
        let mut occupied: Vec<u32> = Vec::new();
        for j in 0..self.masks.len() {
            let lo = self.preds[j].iter().map(|&i| layer[i] + 1).max().unwrap_or(0);
            let mut l = lo;
            while l < occupied.len() && occupied[l] & self.masks[j] != 0 {
                l += 1;
            }
            if l == occupied.len() {
                occupied.push(0);
            }
            occupied[l] |= self.masks[j];
            layer[j] = l;
        }
        occupied.len()
    }

    fn feasible(&self, d: usize, nodes: &mut u64) -> Option<bool> {
        let mut layer = vec![0usize; self.masks.len()];
        let mut occupied = vec![0u32; d];
        self.assign(0, d, &mut layer, &mut occupied, nodes)
    }

    fn assign(&self, j: usize, d: usize, layer: &mut [usize], occupied: &mut [u32], nodes: &mut u64) -> Option<bool> {
        if j == self.masks.len() {
            return Some(true);
        }
        *nodes += 1;
        if *nodes > NODE_BUDGET {
            return None;
        }
        let lo = self.preds[j].iter().map(|&i| layer[i] + 1).max().unwrap_or(0);
        let Some(hi) = d.checked_sub(1 + self.tail[j]) else {
            return Some(false);
        };
        for l in lo..=hi {
            if occupied[l] & self.masks[j] != 0 {
                continue;
            }
            occupied[l] |= self.masks[j];
            layer[j] = l;
            let r = self.assign(j + 1, d, layer, occupied, nodes);
            occupied[l] &= !self.masks[j];
            match r {
                Some(false) => {}
                other => return other,
            }
        }
        Some(false)
    }
}

pub fn depth(gates: &[CircuitGate]) -> Depth {
    let unitary: Vec<CircuitGate> = gates.iter().copied().filter(|g| !matches!(g, CircuitGate::MeasureZ(_))).collect();
    if unitary.is_empty() {
        return Depth { value: 0, exact: true };
    }
    let dag = Dag::new(&unitary);
    let upper = dag.greedy();
    let two_qubit = unitary.iter().filter(|g| g.is_two_qubit()).count();
    if two_qubit > EXACT_DEPTH_LIMIT {
        return Depth { value: upper, exact: false };
    }
    let mut nodes = 0u64;
    for d in dag.lower_bound()..upper {
        match dag.feasible(d, &mut nodes) {
            Some(true) => return Depth { value: d, exact: true },
            Some(false) => {}
            None => return Depth { value: upper, exact: false },
        }
    }
    Depth { value: upper, exact: true }
}
