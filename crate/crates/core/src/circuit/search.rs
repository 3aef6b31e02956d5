//! Randomised search over equivalent graphs for cheaper circuits.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{synthesize_layered, Circuit, CircuitMetrics, LayeredCircuit};
use crate::error::Result;
use crate::graph::{Labeling, NKGraph};

#[derive(Clone, Copy, PartialEq, Eq, Debug, Default, Serialize, Deserialize, clap::ValueEnum)]
pub enum Objective {
    #[default]
    TwoQubit,
    Depth,
    KeepGates,
}

impl Objective {
    /// Lexicographic score, primary metric first.
    pub fn score(self, m: &CircuitMetrics) -> (usize, usize, usize) {
        let (a, b, c) = (m.two_qubit_count, m.depth, m.keep_gate_count);
        match self {
            Objective::TwoQubit => (a, b, c),
            Objective::Depth => (b, a, c),
            Objective::KeepGates => (c, a, b),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SearchConfig {
    pub objective: Objective,
    /// Number of graphs visited; 0 returns the direct synthesis.
    pub budget: usize,
    pub seed: u64,
    /// Also synthesise from every valid labeling, not just the default one.
    pub search_labelings: bool,
    /// Random moves before the walk restarts from the incumbent's graph; 0 never restarts.
    pub walk_length: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { objective: Objective::TwoQubit, budget: 200, seed: 0, search_labelings: false, walk_length: 8 }
    }
}

#[derive(Clone, Debug)]
pub struct SearchResult {
    pub circuit: Circuit,
    pub metrics: CircuitMetrics,
    /// Graph whose synthesis (possibly refined) produced the circuit.
    pub graph: NKGraph,
}

struct Incumbent {
    key: ((usize, usize, usize), String),
    layered: LayeredCircuit,
    circuit: Circuit,
    metrics: CircuitMetrics,
    graph: NKGraph,
}

fn evaluate(layered: LayeredCircuit, graph: &NKGraph, objective: Objective) -> Incumbent {
    let circuit = layered.to_circuit();
    let metrics = circuit.metrics();
    let key = (objective.score(&metrics), circuit.to_json());
    Incumbent { key, layered, circuit, metrics, graph: graph.clone() }
}

/// Valid labelings: the default one, or every choice of `k` independent pivot outputs.
fn labelings(g: &NKGraph, all: bool) -> Result<Vec<Labeling>> {
    let first = g.find_valid_labeling()?;
    if !all {
        return Ok(vec![first]);
    }
    let outputs = g.outputs();
    let (n, k) = (outputs.len(), g.k_in());
    let mut out = Vec::new();
    for subset in 0u32..(1 << n) {
        if subset.count_ones() as usize != k {
            continue;
        }
        let mut order: Vec<usize> = (0..n).filter(|&i| subset >> i & 1 == 1).map(|i| outputs[i]).collect();
        order.extend((0..n).filter(|&i| subset >> i & 1 == 0).map(|i| outputs[i]));
        let l = Labeling { output_order: order };
        if g.is_valid_labeling(&l) {
            out.push(l);
        }
    }
    Ok(out)
}

/// Walk the orbit of `g` with random local complementations and input edge
/// flips. Each visited graph contributes its direct and commuted syntheses;
/// those not worse than the incumbent on the primary metric are hill-climbed
/// with the rewrites of [`neighbours`].
///
/// Deterministic for a fixed seed, and the visited graphs for a larger budget
/// extend those of a smaller one, so the result never gets worse with budget.
pub fn heuristic_search(g: &NKGraph, cfg: &SearchConfig) -> Result<SearchResult> {
    let obj = cfg.objective;
    let direct = synthesize_layered(g, &g.find_valid_labeling()?)?;
    let mut best = evaluate(direct, g, obj);
    if cfg.budget == 0 {
        return Ok(SearchResult { circuit: best.circuit, metrics: best.metrics, graph: best.graph });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut current = g.clone();
    let k = g.k_in();
    let inputs = g.inputs();
    for step in 0..cfg.budget {
        if step > 0 && cfg.walk_length > 0 && step % cfg.walk_length == 0 {
            current = best.graph.clone();
        }
        if step > 0 {
            let flips = k * k.saturating_sub(1) / 2;
            let r = rng.random_range(0..current.num_vertices() + flips);
            current = if r < current.num_vertices() {
                current.local_complement(r)?
            } else {
                let mut idx = r - current.num_vertices();
                let mut pair = (inputs[0], inputs[1]);
                'outer: for a in 0..k {
                    for b in a + 1..k {
                        if idx == 0 {
                            pair = (inputs[a], inputs[b]);
                            break 'outer;
                        }
                        idx -= 1;
                    }
                }
                current.edge_flip(pair.0, pair.1)?
            };
        }
        for l in labelings(&current, cfg.search_labelings)? {
            let layered = synthesize_layered(&current, &l)?;
            let mut tidy = layered.clone();
            tidy.normalize();
            for cand in [layered.commuted(), layered, tidy] {
                let c = evaluate(cand, &current, obj);
                // refine anything competitive on the primary metric
                if c.key.0 .0 <= best.key.0 .0 {
                    let r = refine(c, obj);
                    if r.key < best.key {
                        best = r;
                    }
                }
            }
        }
    }
    Ok(SearchResult { circuit: best.circuit, metrics: best.metrics, graph: best.graph })
}

fn refine(mut inc: Incumbent, obj: Objective) -> Incumbent {
    loop {
        let mut next: Option<Incumbent> = None;
        for cand in neighbours(&inc.layered) {
            let c = evaluate(cand, &inc.graph, obj);
            if next.as_ref().map_or(c.key < inc.key, |b| c.key < b.key) {
                next = Some(c);
            }
        }
        match next {
            Some(better) => inc = better,
            None => return inc,
        }
    }
}

/// One-step rewrites: a measured-qubit CNOT before measurement, one CZ moved to
/// another slot, or one CNOT shifted to either end of its commuting run with a
/// neighbouring CZ moved across it. Every result is normalised.
pub fn neighbours(l: &LayeredCircuit) -> Vec<LayeredCircuit> {
    let mut out = Vec::new();
    let mut push = |mut c: LayeredCircuit| {
        c.normalize();
        out.push(c);
    };
    for control in l.keep..l.n {
        for target in l.keep..l.n {
            if let Ok(c) = l.insert_meas_cnot(control, target) {
                push(c);
            }
        }
    }
    for (s, a, b) in l.cz_positions() {
        for to in 0..l.slots.len() {
            if to != s {
                push(l.move_cz(a, b, s, to).expect("CZ present"));
            }
        }
    }
    for p in 0..l.cnots.len() {
        let (mut front, mut q) = (l.clone(), p);
        while q > 0 {
            match front.swap_cnots(q - 1) {
                Ok(c) => {
                    front = c;
                    q -= 1;
                }
                Err(_) => break,
            }
        }
        for (s, a, b) in front.cz_positions() {
            if s == q {
                push(front.move_cz(a, b, q, q + 1).expect("CZ present"));
            }
        }
        let (mut back, mut q) = (l.clone(), p);
        while q + 1 < l.cnots.len() {
            match back.swap_cnots(q) {
                Ok(c) => {
                    back = c;
                    q += 1;
                }
                Err(_) => break,
            }
        }
        for (s, a, b) in back.cz_positions() {
            if s == q + 1 {
                push(back.move_cz(a, b, q + 1, q).expect("CZ present"));
            }
        }
    }
    out
}
