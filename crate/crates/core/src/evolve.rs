//! Genetic search over noisy distillation circuits.
//!
//! A genome is a gate list over a register of `register_width` slots. Every
//! slot starts with a raw Werner pair; a measured slot is empty until a later
//! gate touches it, which loads a fresh raw pair. At most `raw_pair_budget`
//! pairs may be loaded in total, and exactly `k` slots must be occupied at the
//! end. Fitness is the post-selected (all coincidences) joint fidelity of those
//! `k` pairs under the Bell-diagonal simulator.

use std::fmt;
use std::time::{Duration, Instant};

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bellsim::{BellDiagonalState, BilateralGate, NoiseModel, MAX_PAIRS};
use crate::circuit::{Circuit, CircuitGate};
use crate::error::{Error, Result};
use crate::stats::werner_coefficients;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Gene {
    Cnot { control: usize, target: usize },
    Cz { a: usize, b: usize },
    /// Coincidence measurement; the run continues only on the agreeing outcome.
    Measure { slot: usize },
}

impl fmt::Display for Gene {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Gene::Cnot { control, target } => write!(f, "CNOT({control},{target})"),
            Gene::Cz { a, b } => write!(f, "CZ({a},{b})"),
            Gene::Measure { slot } => write!(f, "M({slot})"),
        }
    }
}

impl Gene {
    /// Register slots the gene touches.
    pub fn slots(&self) -> Vec<usize> {
        match *self {
            Gene::Cnot { control, target } => vec![control, target],
            Gene::Cz { a, b } => vec![a, b],
            Gene::Measure { slot } => vec![slot],
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Genome {
    pub ops: Vec<Gene>,
    pub register_width: usize,
    pub raw_pair_budget: usize,
}

/// Post-selected result of running a genome.
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct Outcome {
    pub success_probability: f64,
    pub fidelity: f64,
    pub raw_pairs: usize,
}

impl fmt::Display for Genome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ops: Vec<String> = self.ops.iter().map(Gene::to_string).collect();
        write!(f, "[{}] {}", self.register_width, ops.join(" "))
    }
}

/// Slot bookkeeping shared by the simulator and the circuit export.
struct Register {
    slots: Vec<Option<usize>>,
    loads: usize,
    budget: usize,
}

impl Register {
    fn new(width: usize, budget: usize) -> Result<Self> {
        if width == 0 || width > budget {
            return Err(Error::InvalidInput(format!("register width {width} must be in 1..={budget}")));
        }
        Ok(Register { slots: (0..width).map(Some).collect(), loads: width, budget })
    }

    fn slot(&self, s: usize) -> Result<Option<usize>> {
        self.slots.get(s).copied().ok_or_else(|| Error::Index(format!("slot {s} outside the register")))
    }

    /// Pair id in slot `s`, loading a fresh pair into an empty slot.
    fn occupy(&mut self, s: usize) -> Result<(usize, bool)> {
        match self.slot(s)? {
            Some(id) => Ok((id, false)),
            None => {
                if self.loads == self.budget {
                    return Err(Error::InvalidInput(format!("more than {} raw pairs", self.budget)));
                }
                let id = self.loads;
                self.loads += 1;
                self.slots[s] = Some(id);
                Ok((id, true))
            }
        }
    }

    fn alive(&self) -> Vec<usize> {
        self.slots.iter().flatten().copied().collect()
    }
}

impl Genome {
    pub fn new(ops: Vec<Gene>, register_width: usize, raw_pair_budget: usize) -> Self {
        Genome { ops, register_width, raw_pair_budget }
    }

    /// Walk the genome, calling `gate` for two-slot genes (with freshly loaded
    /// pair ids first) and `measure` for measurements.
    fn walk(
        &self,
        k: usize,
        mut gate: impl FnMut(&Gene, usize, usize, &[usize]) -> Result<()>,
        mut measure: impl FnMut(usize) -> Result<()>,
    ) -> Result<Register> {
        let mut reg = Register::new(self.register_width, self.raw_pair_budget)?;
        for g in &self.ops {
            match *g {
                Gene::Cnot { control: a, target: b } | Gene::Cz { a, b } => {
                    if a == b {
                        return Err(Error::InvalidInput(format!("{g} acts on one slot")));
                    }
                    let (ia, fa) = reg.occupy(a)?;
                    let (ib, fb) = reg.occupy(b)?;
                    let fresh: Vec<usize> = [(ia, fa), (ib, fb)].iter().filter(|x| x.1).map(|x| x.0).collect();
                    gate(g, ia, ib, &fresh)?;
                }
                Gene::Measure { slot } => {
                    let id = reg.slot(slot)?.ok_or_else(|| Error::InvalidInput(format!("{g} on an empty slot")))?;
                    measure(id)?;
                    reg.slots[slot] = None;
                }
            }
        }
        if reg.alive().len() != k {
            return Err(Error::InvalidInput(format!("{} pairs survive, expected {k}", reg.alive().len())));
        }
        Ok(reg)
    }

    /// Run on Werner inputs of fidelity `f_in`, keeping only all-agreeing coincidences.
    pub fn run(&self, k: usize, f_in: f64, noise: &NoiseModel) -> Result<Outcome> {
        if self.register_width > MAX_PAIRS {
            return Err(Error::SizeLimit(format!("register width {} exceeds {MAX_PAIRS}", self.register_width)));
        }
        let w = werner_coefficients(f_in);
        let mut state = BellDiagonalState::uniform(0)?;
        for id in 0..self.register_width {
            state = state.append_pair(id, w)?;
        }
        let mut success = 1.0;
        let mut zero = false;
        let cell = std::cell::RefCell::new(state);
        let reg = self.walk(
            k,
            |g, a, b, fresh| {
                let mut s = cell.borrow_mut();
                for &id in fresh {
                    *s = s.append_pair(id, w)?;
                }
                let gate = match g {
                    Gene::Cnot { .. } => BilateralGate::Cnot { control: a, target: b },
                    _ => BilateralGate::Cz(a, b),
                };
                *s = s.apply_bilateral_gate(gate, noise)?;
                Ok(())
            },
            |id| {
                let mut s = cell.borrow_mut();
                let [agree, _] = s.measure_pair(id, noise)?;
                success *= agree.probability;
                match agree.state {
                    Some(next) => *s = next,
                    None => {
                        zero = true;
                        return Err(Error::ZeroProbability(0));
                    }
                }
                Ok(())
            },
        );
        let reg = match reg {
            Err(_) if zero => return Ok(Outcome { success_probability: 0.0, fidelity: 0.0, raw_pairs: 0 }),
            r => r?,
        };
        Ok(Outcome { success_probability: success, fidelity: cell.into_inner().fidelity(), raw_pairs: reg.loads })
    }

    /// Post-selected output fidelity; invalid genomes and impossible runs score `-inf`.
    pub fn fitness(&self, k: usize, f_in: f64, noise: &NoiseModel) -> f64 {
        match self.run(k, f_in, noise) {
            Ok(o) if o.success_probability > 0.0 => o.fidelity,
            _ => f64::NEG_INFINITY,
        }
    }

    /// Equivalent circuit with one qubit per raw pair: survivors first, then
    /// measured pairs in measurement order.
    pub fn to_circuit(&self, k: usize) -> Result<Circuit> {
        let mut events: Vec<(Gene, usize, usize)> = Vec::new();
        let mut measured = Vec::new();
        let reg = {
            let ev = std::cell::RefCell::new((&mut events, &mut measured));
            self.walk(
                k,
                |g, a, b, _| {
                    ev.borrow_mut().0.push((*g, a, b));
                    Ok(())
                },
                |id| {
                    let mut e = ev.borrow_mut();
                    e.0.push((Gene::Measure { slot: id }, id, id));
                    e.1.push(id);
                    Ok(())
                },
            )?
        };
        let mut qubit = vec![0usize; reg.loads];
        for (q, id) in reg.alive().into_iter().chain(measured.iter().copied()).enumerate() {
            qubit[id] = q;
        }
        let gates = events
            .into_iter()
            .map(|(g, a, b)| match g {
                Gene::Cnot { .. } => CircuitGate::Cnot { control: qubit[a], target: qubit[b] },
                Gene::Cz { .. } => CircuitGate::Cz(qubit[a], qubit[b]),
                Gene::Measure { .. } => CircuitGate::MeasureZ(qubit[a]),
            })
            .collect();
        Circuit::new(reg.loads, k, gates)
    }
}

fn random_pair<R: Rng + ?Sized>(width: usize, rng: &mut R) -> (usize, usize) {
    let a = rng.random_range(0..width);
    let b = (a + rng.random_range(1..width)) % width;
    (a, b)
}

/// A uniformly chosen gene kind with random slots.
pub fn random_gene<R: Rng + ?Sized>(width: usize, rng: &mut R) -> Gene {
    if width < 2 {
        return Gene::Measure { slot: 0 };
    }
    let (a, b) = random_pair(width, rng);
    match rng.random_range(0..3) {
        0 => Gene::Cnot { control: a, target: b },
        1 => Gene::Cz { a, b },
        _ => Gene::Measure { slot: a },
    }
}

/// Random genome of `len` genes that is valid by construction: gates touch
/// loaded slots (or load fresh pairs while the budget lasts), and measurements
/// are forced once the remaining genes are needed to reach `k` survivors.
/// Validity needs `len >= width - k`, one measurement per surplus slot.
pub fn random_genome<R: Rng + ?Sized>(n: usize, k: usize, width: usize, len: usize, rng: &mut R) -> Genome {
    let mut alive: Vec<bool> = vec![true; width];
    let mut loads = width;
    let mut ops = Vec::with_capacity(len);
    for step in 0..len {
        let live: Vec<usize> = (0..width).filter(|&s| alive[s]).collect();
        // loading up to two fresh pairs must still leave room to measure back down to k
        let room = live.len() + 2 <= k + (len - step - 1);
        let usable: Vec<usize> = if loads + 2 <= n && room { (0..width).collect() } else { live.clone() };
        let must_measure = live.len() > k && live.len() - k >= len - step;
        let can_measure = live.len() > k;
        let can_gate = usable.len() >= 2 && !must_measure;
        if !can_gate && !can_measure {
            break;
        }
        if can_measure && (!can_gate || must_measure || rng.random_range(0..3) == 0) {
            let slot = *live.choose(rng).expect("a live slot");
            alive[slot] = false;
            ops.push(Gene::Measure { slot });
            continue;
        }
        let a = *usable.choose(rng).expect("usable slots");
        let b = **usable.iter().filter(|&&s| s != a).collect::<Vec<_>>().choose(rng).expect("two usable slots");
        for s in [a, b] {
            if !alive[s] {
                alive[s] = true;
                loads += 1;
            }
        }
        ops.push(if rng.random_bool(0.5) { Gene::Cnot { control: a, target: b } } else { Gene::Cz { a, b } });
    }
    Genome::new(ops, width, n)
}

/// The four perturbations: insert, delete, swap two genes, re-parameterise one gene.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum Mutation {
    Insert,
    Delete,
    Swap,
    Reparameterize,
}

impl Mutation {
    pub const ALL: [Mutation; 4] = [Mutation::Insert, Mutation::Delete, Mutation::Swap, Mutation::Reparameterize];
}

pub fn mutate<R: Rng + ?Sized>(g: &Genome, kind: Mutation, rng: &mut R) -> Genome {
    let mut out = g.clone();
    let len = out.ops.len();
    let w = out.register_width;
    match kind {
        Mutation::Insert => {
            let at = rng.random_range(0..=len);
            out.ops.insert(at, random_gene(w, rng));
        }
        Mutation::Delete if len > 0 => {
            out.ops.remove(rng.random_range(0..len));
        }
        Mutation::Swap if len > 1 => {
            let (i, j) = random_pair(len, rng);
            out.ops.swap(i, j);
        }
        Mutation::Reparameterize if len > 0 => {
            let i = rng.random_range(0..len);
            out.ops[i] = match out.ops[i] {
                Gene::Cnot { control, target } if rng.random_bool(0.5) => Gene::Cz { a: control, b: target },
                Gene::Cz { a, b } if rng.random_bool(0.5) => Gene::Cnot { control: a, target: b },
                Gene::Measure { .. } => Gene::Measure { slot: rng.random_range(0..w) },
                Gene::Cnot { .. } | Gene::Cz { .. } if w >= 2 => {
                    let (a, b) = random_pair(w, rng);
                    match out.ops[i] {
                        Gene::Cnot { .. } => Gene::Cnot { control: a, target: b },
                        _ => Gene::Cz { a, b },
                    }
                }
                other => other,
            };
        }
        _ => {}
    }
    out
}

/// Child of a single splice: a prefix of `a` followed by a suffix of `b`.
pub fn crossover<R: Rng + ?Sized>(a: &Genome, b: &Genome, rng: &mut R) -> Genome {
    let i = rng.random_range(0..=a.ops.len());
    let j = rng.random_range(0..=b.ops.len());
    let ops = a.ops[..i].iter().chain(&b.ops[j..]).copied().collect();
    Genome::new(ops, a.register_width, a.raw_pair_budget)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GaConfig {
    pub population: usize,
    pub parent_pairs: usize,
    pub children_per_pair: usize,
    /// Mutants per surviving individual and per mutation type.
    pub mutants_per_type: usize,
    /// How many of the four mutation types are used, in [`Mutation::ALL`] order.
    pub mutation_types: usize,
    pub max_generations: usize,
    /// Stop once the best fitness is unchanged for this many generations; 0 disables.
    pub convergence_window: usize,
    /// Wall-clock limit in seconds; results are only reproducible without one.
    pub wallclock_seconds: Option<f64>,
    /// Register slots; defaults to the raw pair budget `n`.
    pub register_width: Option<usize>,
    pub seed: u64,
}

impl Default for GaConfig {
    fn default() -> Self {
        GaConfig {
            population: 300,
            parent_pairs: 20,
            children_per_pair: 100,
            mutants_per_type: 2,
            mutation_types: 4,
            max_generations: 100,
            convergence_window: 15,
            wallclock_seconds: None,
            register_width: None,
            seed: 0,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<()> {
        let positive =
            [("population", self.population), ("parent_pairs", self.parent_pairs), ("children_per_pair", self.children_per_pair)];
        for (name, v) in positive {
            if v == 0 {
                return Err(Error::InvalidInput(format!("{name} must be positive")));
            }
        }
        if !(1..=4).contains(&self.mutation_types) {
            return Err(Error::InvalidInput("mutation_types must be in 1..=4".into()));
        }
        if self.wallclock_seconds.is_some_and(|s| s.is_nan() || s <= 0.0) {
            return Err(Error::InvalidInput("wallclock_seconds must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    MaxGenerations,
    Converged,
    Wallclock,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub generation: usize,
    pub best_fitness: f64,
    pub valid_individuals: usize,
}

/// Everything needed to reproduce and inspect a run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub n: usize,
    pub k: usize,
    pub f_in: f64,
    pub noise: NoiseModel,
    pub config: GaConfig,
    pub best: Genome,
    pub best_fitness: f64,
    pub best_success_probability: f64,
    pub history: Vec<GenerationRecord>,
    pub stop_reason: StopReason,
}

struct Scored {
    fitness: f64,
    key: String,
    genome: Genome,
}

fn score(genomes: Vec<Genome>, k: usize, f_in: f64, noise: &NoiseModel) -> Vec<Scored> {
    genomes
        .into_par_iter()
        .map(|genome| Scored { fitness: genome.fitness(k, f_in, noise), key: genome.to_string(), genome })
        .collect()
}

/// Best first, ties broken by the genome text; duplicates removed.
fn select(mut pool: Vec<Scored>, size: usize) -> Vec<Scored> {
    pool.sort_by(|a, b| b.fitness.total_cmp(&a.fitness).then_with(|| a.key.cmp(&b.key)));
    pool.dedup_by(|a, b| a.key == b.key);
    pool.truncate(size);
    pool
}

/// Elitist genetic search for an `n -> k` circuit on Werner inputs.
pub fn evolve(n: usize, k: usize, f_in: f64, noise: &NoiseModel, cfg: &GaConfig) -> Result<RunManifest> {
    cfg.validate()?;
    if k == 0 || k > n {
        return Err(Error::InvalidInput(format!("need 1 <= k <= n, got n={n}, k={k}")));
    }
    let width = cfg.register_width.unwrap_or(n);
    if width < k || width > n || width > MAX_PAIRS {
        return Err(Error::InvalidInput(format!("register width {width} must be in {k}..={}", n.min(MAX_PAIRS))));
    }
    if !(0.0..=1.0).contains(&f_in) {
        return Err(Error::InvalidInput(format!("F = {f_in} is not a fidelity")));
    }
    let start = Instant::now();
    let limit = cfg.wallclock_seconds.map(Duration::from_secs_f64);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let initial = (0..cfg.population).map(|_| random_genome(n, k, width, n + 2, &mut rng)).collect();
    let mut pop = select(score(initial, k, f_in, noise), cfg.population);
    let mut history = Vec::new();
    let mut stop = StopReason::MaxGenerations;
    let mut unchanged = 0;
    let record = |generation: usize, pop: &[Scored]| GenerationRecord {
        generation,
        best_fitness: pop[0].fitness,
        valid_individuals: pop.iter().filter(|s| s.fitness.is_finite()).count(),
    };
    history.push(record(0, &pop));
    for generation in 1..=cfg.max_generations {
        if limit.is_some_and(|l| start.elapsed() >= l) {
            stop = StopReason::Wallclock;
            break;
        }
        let mut offspring = Vec::new();
        for _ in 0..cfg.parent_pairs {
            let a = rng.random_range(0..pop.len());
            let b = if pop.len() > 1 { (a + rng.random_range(1..pop.len())) % pop.len() } else { a };
            for _ in 0..cfg.children_per_pair {
                offspring.push(crossover(&pop[a].genome, &pop[b].genome, &mut rng));
            }
        }
        for s in &pop {
            for &kind in &Mutation::ALL[..cfg.mutation_types] {
                for _ in 0..cfg.mutants_per_type {
                    offspring.push(mutate(&s.genome, kind, &mut rng));
                }
            }
        }
        let previous = pop[0].fitness;
        let mut pool = pop;
        pool.extend(score(offspring, k, f_in, noise));
        pop = select(pool, cfg.population);
        history.push(record(generation, &pop));
        unchanged = if pop[0].fitness == previous { unchanged + 1 } else { 0 };
        if cfg.convergence_window > 0 && unchanged >= cfg.convergence_window {
            stop = StopReason::Converged;
            break;
        }
    }
    let best = pop.swap_remove(0);
    let success = best.genome.run(k, f_in, noise).map_or(0.0, |o| o.success_probability);
    Ok(RunManifest {
        n,
        k,
        f_in,
        noise: *noise,
        config: cfg.clone(),
        best: best.genome,
        best_fitness: best.fitness,
        best_success_probability: success,
        history,
        stop_reason: stop,
    })
}
